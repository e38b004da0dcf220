#include "infokm/bounds.hpp"

#include <cmath>

namespace ikm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nk(std::int64_t n, std::int32_t k) {
  if (k < 2) throw invalid_input("bound: k >= 2 required");
  if (n < 2 * static_cast<std::int64_t>(k)) {
    throw invalid_input("bound: n >= 2k required");
  }
}

void require_delta(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw invalid_input("bound: delta in (0,1) required");
  }
}

double deviation_factor(DeviationMode mode, std::int64_t n, double delta) {
  const double dn = static_cast<double>(n);
  switch (mode) {
    case DeviationMode::uniform:
      return std::sqrt(std::log(1.0 / delta) / (2.0 * dn));
    case DeviationMode::excess:
      return std::sqrt(2.0 * std::log(1.0 / delta) / dn);
    case DeviationMode::expectation:
      return 0.0;
  }
  return 0.0;
}

BoundReport assemble(std::string kind, DeviationMode mode,
                     std::vector<BoundTerm> inputs,
                     std::vector<BoundTerm> terms,
                     std::vector<BoundTerm> extras = {}) {
  BoundReport r;
  r.kind = std::move(kind);
  r.mode = mode;
  r.inputs = std::move(inputs);
  r.terms = std::move(terms);
  r.extras = std::move(extras);
  r.total = 0.0;
  for (const BoundTerm& t : r.terms) r.total += t.value;
  return r;
}

// The bracket shared by the robust and information bounds:
// chaining + residual, and the variance radical, before any outer scale.
struct Bracket {
  double chaining = 0.0;
  double variance = 0.0;
};

Bracket scale_free_bracket(std::int64_t n, std::int32_t k) {
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  const double logk = std::log(dk);
  Bracket b;
  b.chaining = std::log(dn / dk) / std::log(2.0) *
                   std::sqrt(8.0 * dk * logk / dn) +
               2.0 * std::sqrt(dk * logk / dn);
  b.variance =
      std::sqrt((std::sqrt(2.0) + 1.0) * dk * (3.0 + 2.0 * logk) / dn);
  return b;
}

}  // namespace

BoundReport linear_bound(const LinearBoundInputs& in) {
  require_nk(in.n, in.k);
  require_delta(in.delta);
  if (!(in.theta_norm >= 0.0) || !(in.w_norm >= 0.0)) {
    throw invalid_input("linear_bound: norms must be nonnegative");
  }
  if (!(in.a <= in.b)) throw invalid_input("linear_bound: a <= b required");
  if (!(in.epsilon >= 0.0)) {
    throw invalid_input("linear_bound: epsilon must be nonnegative");
  }

  const double dn = static_cast<double>(in.n);
  const double dk = static_cast<double>(in.k);
  const double logk = std::log(dk);
  const double tw = in.theta_norm * in.w_norm;
  const double range = in.b - in.a;

  const double chaining = (std::log(dn / dk) / std::log(2.0)) *
                              std::sqrt(8.0 * logk / dn) * tw +
                          2.0 * std::sqrt(logk / dn) * tw;
  const double variance = std::sqrt(
      (std::sqrt(2.0) + 1.0) *
      (dk * range * range + 2.0 * std::log(std::exp(1.0) * dk) * tw * tw) /
      dn);
  const double deviation = deviation_factor(in.mode, in.n, in.delta) * range;

  std::vector<BoundTerm> terms{{"chaining", chaining},
                               {"variance", variance},
                               {"deviation", deviation}};
  if (in.mode == DeviationMode::expectation) {
    terms.push_back({"epsilon", in.epsilon});
  }
  return assemble("linear", in.mode,
                  {{"n", dn},
                   {"k", dk},
                   {"theta_norm", in.theta_norm},
                   {"w_norm", in.w_norm},
                   {"a", in.a},
                   {"b", in.b},
                   {"delta", in.delta},
                   {"epsilon", in.epsilon}},
                  std::move(terms));
}

BoundReport quadratic_bound(std::int64_t n, std::int32_t k, double B,
                            double delta, DeviationMode mode) {
  require_nk(n, k);
  require_delta(delta);
  if (!(B >= 0.0)) throw invalid_input("quadratic_bound: B >= 0 required");

  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  const double B2 = B * B;
  const double main =
      16.0 * B2 * std::log(dn / dk) * std::sqrt(dk * std::log(dk) / dn);
  double deviation = 0.0;
  switch (mode) {
    case DeviationMode::uniform:
      deviation = 2.0 * B2 * std::sqrt(2.0 * std::log(1.0 / delta) / dn);
      break;
    case DeviationMode::excess:
      deviation = 4.0 * B2 * std::sqrt(2.0 * std::log(1.0 / delta) / dn);
      break;
    case DeviationMode::expectation:
      deviation = 0.0;
      break;
  }
  return assemble("quadratic", mode,
                  {{"n", dn}, {"k", dk}, {"B", B}, {"delta", delta}},
                  {{"main", main}, {"deviation", deviation}});
}

BoundReport quadratic_bound_unsimplified(std::int64_t n, std::int32_t k,
                                         double B, double delta,
                                         DeviationMode mode) {
  require_nk(n, k);
  require_delta(delta);
  if (!(B >= 0.0)) throw invalid_input("quadratic_bound: B >= 0 required");

  // The quadratic criterion rides the linear bound with
  // ||Theta|| ||W||_inf <= 3 sqrt(k) B^2 and range b - a = 4 B^2.
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  const double logk = std::log(dk);
  const double B2 = B * B;
  const double tw = 3.0 * std::sqrt(dk) * B2;

  const double chaining = (std::log(dn / dk) / std::log(2.0)) *
                              std::sqrt(8.0 * logk / dn) * tw +
                          2.0 * std::sqrt(logk / dn) * tw;
  const double variance = B2 * std::sqrt(2.0 * (std::sqrt(2.0) + 1.0) *
                                         (17.0 + 9.0 * logk) * dk / dn);
  const double deviation =
      4.0 * B2 * deviation_factor(mode, n, delta);

  return assemble("quadratic_unsimplified", mode,
                  {{"n", dn}, {"k", dk}, {"B", B}, {"delta", delta}},
                  {{"chaining", chaining},
                   {"variance", variance},
                   {"deviation", deviation}},
                  {{"eta_k", simple_eta(k)}});
}

BoundReport robust_bound(std::int64_t n, std::int32_t k, double sigma,
                         double delta, DeviationMode mode) {
  require_nk(n, k);
  require_delta(delta);
  if (!(sigma > 0.0)) throw invalid_input("robust_bound: sigma > 0 required");

  const double scale = 2.0 * sigma * sigma;
  const Bracket br = scale_free_bracket(n, k);
  const double deviation = scale * deviation_factor(mode, n, delta);
  return assemble("robust", mode,
                  {{"n", static_cast<double>(n)},
                   {"k", static_cast<double>(k)},
                   {"sigma", sigma},
                   {"delta", delta}},
                  {{"chaining", scale * br.chaining},
                   {"variance", scale * br.variance},
                   {"deviation", deviation}});
}

BoundReport info_bound(std::int64_t n, std::int32_t k, double B, double C,
                       double delta, DeviationMode mode) {
  require_nk(n, k);
  require_delta(delta);
  if (!(B >= 1.0)) {
    throw invalid_input("info_bound: B >= 1 required (log B must be nonnegative)");
  }
  if (!(C >= 0.0)) throw invalid_input("info_bound: C >= 0 required");

  const double factor = B * C + 2.0 * std::log(B);
  const Bracket br = scale_free_bracket(n, k);
  const double deviation = deviation_factor(mode, n, delta) * factor;
  return assemble("info", mode,
                  {{"n", static_cast<double>(n)},
                   {"k", static_cast<double>(k)},
                   {"B", B},
                   {"C", C},
                   {"delta", delta}},
                  {{"chaining", br.chaining * factor},
                   {"variance", br.variance * factor},
                   {"deviation", deviation}},
                  {{"factor", factor}});
}

InfoConstants info_constants_from_data(std::span<const Density> data) {
  if (data.empty()) {
    throw invalid_input("info_constants_from_data: data must be nonempty");
  }
  const auto& nu = *data[0].measure();
  InfoConstants out;
  double max_log_sq = 0.0;   // max_i integral log(p_i)^2 dnu
  double max_kl_one = 0.0;   // max_i K(1, p_i)
  double max_sq_mass = 0.0;  // max_i integral p_i^2 dnu
  for (const Density& p : data) {
    if (p.size() != nu.size() || !p.measure()->same_as(nu)) {
      throw invalid_input(
          "info_constants_from_data: densities must share the reference measure");
    }
    double log_sq = 0.0, kl_one = 0.0, sq_mass = 0.0;
    for (Eigen::Index y = 0; y < p.size(); ++y) {
      if (!p.has_support(y)) {
        out.zero_atom = true;
        out.B_hat = out.C_hat = out.R_hat_upper = kInf;
        return out;
      }
      const double lv = p.log_value(y);
      log_sq += lv * lv * nu.weight(y);
      kl_one += -lv * nu.weight(y);
      sq_mass += std::exp(2.0 * lv) * nu.weight(y);
    }
    max_log_sq = std::max(max_log_sq, log_sq);
    max_kl_one = std::max(max_kl_one, kl_one);
    max_sq_mass = std::max(max_sq_mass, sq_mass);
  }
  out.C_hat = std::sqrt(max_log_sq);
  out.R_hat_upper = max_kl_one;
  out.B_hat = std::sqrt(max_sq_mass) * std::exp(max_kl_one);
  return out;
}

double psi(double x) {
  if (x >= 0.0) return std::log1p(x + 0.5 * x * x);
  return -std::log1p(-x + 0.5 * x * x);
}

double max_sq_gaussian_bound(std::int32_t k, double sigma) {
  if (k < 1) throw invalid_input("max_sq_gaussian_bound: k >= 1 required");
  if (!(sigma > 0.0)) {
    throw invalid_input("max_sq_gaussian_bound: sigma > 0 required");
  }
  return 2.0 * sigma * sigma * (1.0 + std::log(static_cast<double>(k)));
}

double simple_eta(std::int32_t k) {
  if (k < 2) throw invalid_input("simple_eta: k >= 2 required");
  const double logk = std::log(static_cast<double>(k));
  return 6.0 +
         std::sqrt(2.0 * (std::sqrt(2.0) + 1.0) * (17.0 + 9.0 * logk) / logk);
}

std::pair<double, double> simple_inequality_slacks() {
  const double log2 = std::log(2.0);
  const double a = 6.0 * std::sqrt(2.0) / log2;
  const double b = 16.0;
  const double constant = 2.0 * std::log(b / 4.0) + std::log(log2);
  const auto slack = [&](double xi) { return constant - (xi - 2.0 * std::log(xi)); };
  return {slack(log2), slack(simple_eta(2) / (b - a))};
}

}  // namespace ikm
