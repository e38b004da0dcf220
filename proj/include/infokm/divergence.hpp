#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "infokm/core.hpp"

namespace ikm {

/// A real in [finite, +inf]; never NaN, never -inf. +inf is the dedicated
/// sentinel for a failed domination in a Kullback divergence, so argmin
/// code can rank it strictly above every finite value.
class ExtendedReal {
 public:
  ExtendedReal() : v_(0.0) {}
  explicit ExtendedReal(double v) : v_(v) {
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
      throw invalid_input("extended real: value must not be NaN or -inf");
    }
  }

  static ExtendedReal infinity() {
    ExtendedReal r;
    r.v_ = std::numeric_limits<double>::infinity();
    return r;
  }

  bool is_finite() const { return std::isfinite(v_); }
  double value() const { return v_; }

  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }
  friend bool operator<(ExtendedReal a, ExtendedReal b) { return a.v_ < b.v_; }
  friend bool operator<=(ExtendedReal a, ExtendedReal b) { return a.v_ <= b.v_; }

 private:
  double v_;
};

/// Joint law on a finite product space; the table is nonnegative and sums
/// to one within 1e-12.
class FiniteJoint {
 public:
  explicit FiniteJoint(Eigen::MatrixXd table);

  Eigen::Index rows() const { return table_.rows(); }
  Eigen::Index cols() const { return table_.cols(); }
  const Eigen::MatrixXd& table() const { return table_; }

  Eigen::VectorXd marginal_x() const { return table_.rowwise().sum(); }
  Eigen::VectorXd marginal_y() const { return table_.colwise().sum().transpose(); }

 private:
  Eigen::MatrixXd table_;
};

/// Kullback divergence between two densities over the same reference
/// measure: sum_y q(y) log(q(y)/p(y)) nu(y), with 0 log 0 = 0 and +inf
/// whenever q puts mass where p has none.
ExtendedReal kl_density(const Density& q, const Density& p);

/// Both sides of the Kullback chain rule for finite joints: the joint
/// divergence, and the X-marginal divergence plus the Q_X-average of the
/// conditional divergences. They agree (or are both +inf).
std::pair<ExtendedReal, ExtendedReal> kl_chain_check(const FiniteJoint& q,
                                                     const FiniteJoint& p);

/// Max absolute gap between the two Radon-Nikodym expressions
/// P(x,y)/(P_X(x) P_Y(y)) and P(y|x)/P_Y(y) over all atoms. Requires
/// strictly positive marginals.
double bayes_identity_check(const FiniteJoint& p);

struct GibbsResult {
  Eigen::ArrayXd rho_star;
  double value = 0.0;  // -log sum_i pi_i exp(-h_i)
};

/// Minimizer of rho -> K(rho, pi) + rho(h) over probability vectors.
/// Computed with a max-shifted log-sum-exp.
GibbsResult gibbs_minimizer(const Eigen::ArrayXd& pi, const Eigen::ArrayXd& h);

struct GeometricMeanResult {
  std::optional<Density> q_star;  // empty iff the supports' intersection is nu-null
  double log_normalizer = 0.0;    // log Z; -inf in the degenerate case
};

/// Weighted geometric mean of densities: q*(y) proportional to
/// exp(sum_i w_i log p_i(y)) on the intersection of supports.
GeometricMeanResult geometric_mean(std::span<const Density> densities,
                                   const Eigen::ArrayXd& weights);

/// sum_i w_i K(q, p_i); pairs with geometric_mean through the Pythagorean
/// decomposition sum_i w_i K(q, p_i) = K(q, q*) + log(1/Z).
ExtendedReal weighted_kl_to_center(std::span<const Density> densities,
                                   const Eigen::ArrayXd& weights,
                                   const Density& q);

/// Divergence between two product Gaussians with common scale:
/// ||x - c||^2 / (2 sigma^2).
double gaussian_kl(const Eigen::VectorXd& x, const Eigen::VectorXd& c,
                   double sigma);

/// Internal building block shared with the chain-rule check: divergence
/// of two nonnegative vectors of equal total mass (as densities against
/// counting measure). Exposed for the harness oracles.
double kl_weights(const Eigen::VectorXd& q, const Eigen::VectorXd& p);

}  // namespace ikm
