#include "infokm/divergence.hpp"

#include <cmath>
#include <string>

#include "infokm/numeric.hpp"

namespace ikm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_shared_measure(const Density& q, const Density& p,
                            const char* where) {
  if (q.size() != p.size() || !q.measure()->same_as(*p.measure())) {
    throw invalid_input(std::string(where) +
                        ": densities must share the same reference measure");
  }
}

}  // namespace

FiniteJoint::FiniteJoint(Eigen::MatrixXd table) : table_(std::move(table)) {
  if (table_.rows() < 1 || table_.cols() < 1) {
    throw invalid_input("finite joint: table must be nonempty");
  }
  double sum = 0.0;
  for (Eigen::Index x = 0; x < table_.rows(); ++x) {
    for (Eigen::Index y = 0; y < table_.cols(); ++y) {
      const double v = table_(x, y);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw invalid_input("finite joint: entries must be finite and nonnegative");
      }
      sum += v;
    }
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw invalid_input("finite joint: table must sum to 1 within 1e-12");
  }
}

ExtendedReal kl_density(const Density& q, const Density& p) {
  require_shared_measure(q, p, "kl_density");
  const auto& nu = *q.measure();
  double acc = 0.0;
  for (Eigen::Index y = 0; y < q.size(); ++y) {
    if (!q.has_support(y)) continue;  // 0 log 0 = 0
    if (!p.has_support(y)) return ExtendedReal::infinity();
    acc += std::exp(q.log_value(y)) * (q.log_value(y) - p.log_value(y)) *
           nu.weight(y);
  }
  return ExtendedReal(std::max(0.0, acc));
}

double kl_weights(const Eigen::VectorXd& q, const Eigen::VectorXd& p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) continue;
    if (p[i] <= 0.0) return kInf;
    acc += q[i] * std::log(q[i] / p[i]);
  }
  return acc;
}

std::pair<ExtendedReal, ExtendedReal> kl_chain_check(const FiniteJoint& q,
                                                     const FiniteJoint& p) {
  if (q.rows() != p.rows() || q.cols() != p.cols()) {
    throw invalid_input("kl_chain_check: joint tables must share a shape");
  }
  // Joint divergence over the flattened table.
  double lhs = 0.0;
  bool lhs_inf = false;
  for (Eigen::Index x = 0; x < q.rows() && !lhs_inf; ++x) {
    for (Eigen::Index y = 0; y < q.cols(); ++y) {
      const double qv = q.table()(x, y);
      if (qv <= 0.0) continue;
      const double pv = p.table()(x, y);
      if (pv <= 0.0) {
        lhs_inf = true;
        break;
      }
      lhs += qv * std::log(qv / pv);
    }
  }

  // Marginal on X plus the Q_X-average of conditional divergences.
  const Eigen::VectorXd qx = q.marginal_x();
  const Eigen::VectorXd px = p.marginal_x();
  double rhs = kl_weights(qx, px);
  bool rhs_inf = std::isinf(rhs);
  for (Eigen::Index x = 0; x < q.rows() && !rhs_inf; ++x) {
    if (qx[x] <= 0.0) continue;
    double cond = 0.0;
    for (Eigen::Index y = 0; y < q.cols(); ++y) {
      const double qc = q.table()(x, y) / qx[x];
      if (qc <= 0.0) continue;
      const double pc = px[x] > 0.0 ? p.table()(x, y) / px[x] : 0.0;
      if (pc <= 0.0) {
        cond = kInf;
        break;
      }
      cond += qc * std::log(qc / pc);
    }
    if (std::isinf(cond)) {
      rhs_inf = true;
    } else {
      rhs += qx[x] * cond;
    }
  }

  return {lhs_inf ? ExtendedReal::infinity() : ExtendedReal(std::max(0.0, lhs)),
          rhs_inf ? ExtendedReal::infinity() : ExtendedReal(std::max(0.0, rhs))};
}

double bayes_identity_check(const FiniteJoint& p) {
  const Eigen::VectorXd px = p.marginal_x();
  const Eigen::VectorXd py = p.marginal_y();
  for (Eigen::Index x = 0; x < px.size(); ++x) {
    if (!(px[x] > 0.0)) {
      throw invalid_input("bayes_identity_check: zero X-marginal at atom " +
                          std::to_string(x));
    }
  }
  for (Eigen::Index y = 0; y < py.size(); ++y) {
    if (!(py[y] > 0.0)) {
      throw invalid_input("bayes_identity_check: zero Y-marginal at atom " +
                          std::to_string(y));
    }
  }
  double gap = 0.0;
  for (Eigen::Index x = 0; x < p.rows(); ++x) {
    for (Eigen::Index y = 0; y < p.cols(); ++y) {
      const double joint_ratio = p.table()(x, y) / (px[x] * py[y]);
      const double cond_ratio = (p.table()(x, y) / px[x]) / py[y];
      gap = std::max(gap, std::abs(joint_ratio - cond_ratio));
    }
  }
  return gap;
}

GibbsResult gibbs_minimizer(const Eigen::ArrayXd& pi, const Eigen::ArrayXd& h) {
  if (pi.size() < 1 || pi.size() != h.size()) {
    throw invalid_input("gibbs_minimizer: pi and h must share a nonempty size");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    if (!(pi[i] >= 0.0) || !std::isfinite(pi[i])) {
      throw invalid_input("gibbs_minimizer: pi is not a probability vector");
    }
    if (!std::isfinite(h[i])) {
      throw invalid_input("gibbs_minimizer: h must be finite");
    }
    sum += pi[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw invalid_input("gibbs_minimizer: pi is not a probability vector");
  }
  std::vector<double> logits(static_cast<std::size_t>(pi.size()));
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    logits[static_cast<std::size_t>(i)] =
        pi[i] > 0.0 ? std::log(pi[i]) - h[i] : -kInf;
  }
  const double log_z = logsumexp(logits);
  GibbsResult out;
  out.value = -log_z;
  out.rho_star.resize(pi.size());
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    const double l = logits[static_cast<std::size_t>(i)];
    out.rho_star[i] = l > -kInf ? std::exp(l - log_z) : 0.0;
  }
  return out;
}

GeometricMeanResult geometric_mean(std::span<const Density> densities,
                                   const Eigen::ArrayXd& weights) {
  if (densities.empty()) {
    throw invalid_input("geometric_mean: density list must be nonempty");
  }
  if (static_cast<std::size_t>(weights.size()) != densities.size()) {
    throw invalid_input("geometric_mean: one weight per density required");
  }
  double wsum = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw invalid_input("geometric_mean: weights must be finite and nonnegative");
    }
    wsum += weights[i];
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw invalid_input("geometric_mean: weights must sum to 1");
  }
  for (std::size_t i = 1; i < densities.size(); ++i) {
    require_shared_measure(densities[0], densities[i], "geometric_mean");
  }

  const auto& nu = *densities[0].measure();
  const Eigen::Index m = densities[0].size();
  Eigen::ArrayXd avg_log = Eigen::ArrayXd::Zero(m);
  for (std::size_t i = 0; i < densities.size(); ++i) {
    const double w = weights[static_cast<Eigen::Index>(i)];
    if (w == 0.0) continue;  // zero weight contributes nothing, even off-support
    for (Eigen::Index y = 0; y < m; ++y) {
      if (avg_log[y] == -kInf) continue;
      avg_log[y] = densities[i].has_support(y)
                       ? avg_log[y] + w * densities[i].log_value(y)
                       : -kInf;
    }
  }

  std::vector<double> mass_logs(static_cast<std::size_t>(m));
  for (Eigen::Index y = 0; y < m; ++y) {
    mass_logs[static_cast<std::size_t>(y)] =
        avg_log[y] > -kInf ? avg_log[y] + std::log(nu.weight(y)) : -kInf;
  }
  const double log_z = logsumexp(mass_logs);

  GeometricMeanResult out;
  out.log_normalizer = log_z;
  if (log_z == -kInf) return out;  // supports intersect in a nu-null set
  Eigen::ArrayXd log_values(m);
  for (Eigen::Index y = 0; y < m; ++y) {
    log_values[y] = avg_log[y] > -kInf ? avg_log[y] - log_z : -kInf;
  }
  out.q_star.emplace(std::move(log_values), densities[0].measure());
  return out;
}

ExtendedReal weighted_kl_to_center(std::span<const Density> densities,
                                   const Eigen::ArrayXd& weights,
                                   const Density& q) {
  if (densities.empty()) {
    throw invalid_input("weighted_kl_to_center: density list must be nonempty");
  }
  if (static_cast<std::size_t>(weights.size()) != densities.size()) {
    throw invalid_input("weighted_kl_to_center: one weight per density required");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    const double w = weights[static_cast<Eigen::Index>(i)];
    if (w == 0.0) continue;
    const ExtendedReal d = kl_density(q, densities[i]);
    if (!d.is_finite()) return ExtendedReal::infinity();
    acc += w * d.value();
  }
  return ExtendedReal(acc);
}

double gaussian_kl(const Eigen::VectorXd& x, const Eigen::VectorXd& c,
                   double sigma) {
  if (!(sigma > 0.0)) throw invalid_input("gaussian_kl: sigma must be positive");
  if (x.size() != c.size()) {
    throw invalid_input("gaussian_kl: dimension mismatch");
  }
  return (x - c).squaredNorm() / (2.0 * sigma * sigma);
}

}  // namespace ikm
