#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "infokm/core.hpp"

namespace ikm {

/// Which deviation constant closes the bound: the observable uniform
/// bound carries sqrt(log(1/delta)/(2n)), excess-risk statements carry
/// sqrt(2 log(1/delta)/n), and bounds in expectation carry none. The
/// three are exposed separately rather than folded into one constant.
enum class DeviationMode { uniform, excess, expectation };

struct BoundTerm {
  std::string label;
  double value = 0.0;
};

/// Itemized evaluation: total is the exact sum of `terms`; `inputs` echoes
/// the call, and `extras` carries named constants that are not part of the
/// total (for example eta_k in the unsimplified quadratic form).
struct BoundReport {
  std::string kind;
  DeviationMode mode = DeviationMode::uniform;
  double total = 0.0;
  std::vector<BoundTerm> terms;
  std::vector<BoundTerm> inputs;
  std::vector<BoundTerm> extras;
};

struct LinearBoundInputs {
  std::int64_t n = 0;
  std::int32_t k = 0;
  double theta_norm = 0.0;  // ||Theta||
  double w_norm = 0.0;      // ||W||_inf
  double a = 0.0;
  double b = 0.0;
  double delta = 0.1;
  DeviationMode mode = DeviationMode::uniform;
  double epsilon = 0.0;  // passed through in expectation mode
};

/// Observable bound for the linear criterion min_j <theta_j, W>.
BoundReport linear_bound(const LinearBoundInputs& in);

/// Simplified quadratic bound 16 B^2 log(n/k) sqrt(k log k / n) plus the
/// mode's deviation term.
BoundReport quadratic_bound(std::int64_t n, std::int32_t k, double B,
                            double delta, DeviationMode mode);

/// The three-term form behind the simplification, with eta_k exposed as a
/// named extra for the endpoint sweep.
BoundReport quadratic_bound_unsimplified(std::int64_t n, std::int32_t k,
                                         double B, double delta,
                                         DeviationMode mode);

/// Bounded-criterion counterpart with the 2 sigma^2 scale in every term.
BoundReport robust_bound(std::int64_t n, std::int32_t k, double sigma,
                         double delta, DeviationMode mode);

/// Information bound: same bracket scaled by (B C + 2 log B). Requires
/// B >= 1 so log B is nonnegative; smaller B is rejected, not clamped.
BoundReport info_bound(std::int64_t n, std::int32_t k, double B, double C,
                       double delta, DeviationMode mode);

/// Plug-in constants for the information bound, computed from data:
/// C = max_i sqrt(integral log(p_i)^2), R is upper bounded through the
/// uniform center q = 1, and B = max_i sqrt(integral p_i^2) exp(R).
/// A zero atom anywhere makes all three +inf and sets zero_atom.
struct InfoConstants {
  double B_hat = 0.0;
  double C_hat = 0.0;
  double R_hat_upper = 0.0;
  bool zero_atom = false;
};
InfoConstants info_constants_from_data(std::span<const Density> data);

/// Influence function: log(1 + x + x^2/2) for x >= 0, odd continuation
/// for x < 0. Evaluated through log1p so the small-x remainder survives.
double psi(double x);

/// E(max_j eps_j^2) <= 2 sigma^2 log(ek) for k centered Gaussians.
double max_sq_gaussian_bound(std::int32_t k, double sigma);

/// eta(k) = 6 + sqrt(2 (sqrt 2 + 1)(17 + 9 log k) / log k).
double simple_eta(std::int32_t k);

/// Endpoint slacks 2 log(b/4) + log(log 2) - (xi - 2 log xi) at
/// xi = log 2 and xi = eta(2)/(b - a), with a = 6 sqrt(2)/log 2, b = 16.
/// Both must be nonnegative for the simplified quadratic bound to hold.
std::pair<double, double> simple_inequality_slacks();

}  // namespace ikm
