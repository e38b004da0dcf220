#include "infokm/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "infokm/numeric.hpp"
#include "infokm/parallel.hpp"

namespace ikm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kSeedStreamTag = 1;

// ---------------------------------------------------------------------------
// Divergence families. A family knows its data, evaluates div(center, datum),
// produces per-cluster centroids, and exposes a seeding weight (any positive
// scalar multiple of the divergence gives the same seeding distribution, so
// the Gaussian-location family uses the raw squared distance and draws the
// same picks as the plain quadratic engine for a given seed).
// ---------------------------------------------------------------------------

struct GaussianFamily {
  using Center = Eigen::RowVectorXd;

  const Eigen::MatrixXd* pts = nullptr;
  double inv_two_sigma_sq = 1.0;

  std::size_t size() const { return static_cast<std::size_t>(pts->rows()); }

  double div(const Center& c, std::size_t i) const {
    return (pts->row(static_cast<Eigen::Index>(i)) - c).squaredNorm() *
           inv_two_sigma_sq;
  }
  double seed_weight(const Center& c, std::size_t i) const {
    return (pts->row(static_cast<Eigen::Index>(i)) - c).squaredNorm();
  }
  Center datum_center(std::size_t i) const {
    return pts->row(static_cast<Eigen::Index>(i));
  }
  std::pair<std::optional<Center>, double> centroid(
      const std::vector<std::int32_t>& members) const {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(pts->cols());
    for (std::int32_t i : members) mean += pts->row(i);
    mean /= static_cast<double>(members.size());
    return {std::move(mean), 0.0};
  }
};

struct HistogramFamily {
  using Center = Density;

  std::span<const Density> data;

  std::size_t size() const { return data.size(); }

  double div(const Center& q, std::size_t i) const {
    return kl_density(q, data[i]).value();
  }
  double seed_weight(const Center& q, std::size_t i) const { return div(q, i); }
  Center datum_center(std::size_t i) const { return data[i]; }
  std::pair<std::optional<Center>, double> centroid(
      const std::vector<std::int32_t>& members) const {
    std::vector<Density> cluster;
    cluster.reserve(members.size());
    for (std::int32_t i : members) cluster.push_back(data[static_cast<std::size_t>(i)]);
    Eigen::ArrayXd w =
        Eigen::ArrayXd::Constant(static_cast<Eigen::Index>(members.size()),
                                 1.0 / static_cast<double>(members.size()));
    w /= w.sum();
    GeometricMeanResult gm = geometric_mean(cluster, w);
    if (!gm.q_star) return {std::nullopt, gm.log_normalizer};
    return {std::move(*gm.q_star), gm.log_normalizer};
  }
};

// ---------------------------------------------------------------------------
// Engine pieces shared by the quadratic, Gaussian-location and histogram
// instantiations.
// ---------------------------------------------------------------------------

template <class Fam>
Labeling assign_impl(const Fam& fam,
                     const std::vector<typename Fam::Center>& centers,
                     int threads, bool* any_all_inf = nullptr) {
  const std::size_t n = fam.size();
  const std::size_t k = centers.size();
  Labeling out;
  out.k = static_cast<std::int32_t>(k);
  out.labels.assign(n, 0);
  std::vector<char> row_inf(n, 0);
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double best = kInf;
      std::int32_t best_j = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const double d = fam.div(centers[j], i);
        if (d < best) {
          best = d;
          best_j = static_cast<std::int32_t>(j);
        }
      }
      out.labels[i] = best_j;
      row_inf[i] = best == kInf ? 1 : 0;
    }
  });
  if (any_all_inf) {
    *any_all_inf = std::find(row_inf.begin(), row_inf.end(), 1) != row_inf.end();
  }
  return out;
}

template <class Fam>
double criterion_impl(const Fam& fam,
                      const std::vector<typename Fam::Center>& centers,
                      int threads) {
  const std::size_t n = fam.size();
  std::vector<double> mins(n);
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double best = kInf;
      for (const auto& c : centers) best = std::min(best, fam.div(c, i));
      mins[i] = best;
    }
  });
  double acc = 0.0;
  for (double v : mins) acc += v;
  return acc / static_cast<double>(n);
}

// Relocates each pending center to the datum with the largest current loss
// against the engaged centers, updating losses after every relocation so two
// pending centers never land on the same datum.
template <class Fam>
void reseed_pending(const Fam& fam,
                    std::vector<std::optional<typename Fam::Center>>& centers,
                    std::vector<double>& log_z,
                    const std::vector<std::size_t>& pending) {
  const std::size_t n = fam.size();
  std::vector<double> loss(n, kInf);
  for (const auto& c : centers) {
    if (!c) continue;
    for (std::size_t i = 0; i < n; ++i) loss[i] = std::min(loss[i], fam.div(*c, i));
  }
  for (std::size_t j : pending) {
    std::size_t pick = 0;
    double best = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if (loss[i] > best) {
        best = loss[i];
        pick = i;
      }
    }
    centers[j] = fam.datum_center(pick);
    log_z[j] = 0.0;  // a single datum normalizes exactly
    for (std::size_t i = 0; i < n; ++i) {
      loss[i] = std::min(loss[i], fam.div(*centers[j], i));
    }
  }
}

template <class Fam>
struct UpdateOut {
  std::vector<typename Fam::Center> centers;
  std::vector<double> log_z;
  bool degenerate = false;
};

template <class Fam>
UpdateOut<Fam> update_impl(const Fam& fam, const Labeling& labels,
                           EmptyClusterPolicy policy,
                           const std::vector<typename Fam::Center>* previous,
                           const std::vector<double>* previous_log_z) {
  const std::size_t k = static_cast<std::size_t>(labels.k);
  std::vector<std::vector<std::int32_t>> members(k);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    members[static_cast<std::size_t>(labels.labels[i])].push_back(
        static_cast<std::int32_t>(i));
  }

  std::vector<std::optional<typename Fam::Center>> next(k);
  std::vector<double> log_z(k, 0.0);
  std::vector<std::size_t> pending;
  bool degenerate = false;

  auto keep = [&](std::size_t j) {
    if (!previous) {
      throw invalid_input("update: keep_previous policy requires previous centers");
    }
    next[j] = (*previous)[j];
    log_z[j] = previous_log_z && previous_log_z->size() == k ? (*previous_log_z)[j] : 0.0;
  };

  for (std::size_t j = 0; j < k; ++j) {
    if (members[j].empty()) {
      if (policy == EmptyClusterPolicy::keep_previous) {
        keep(j);
      } else {
        pending.push_back(j);
      }
      continue;
    }
    auto [center, lz] = fam.centroid(members[j]);
    if (!center) {
      degenerate = true;  // the cluster's supports never overlap
      if (policy == EmptyClusterPolicy::keep_previous) {
        keep(j);
      } else {
        pending.push_back(j);
      }
      continue;
    }
    next[j] = std::move(*center);
    log_z[j] = lz;
  }

  if (!pending.empty()) reseed_pending(fam, next, log_z, pending);

  UpdateOut<Fam> out;
  out.centers.reserve(k);
  for (std::size_t j = 0; j < k; ++j) out.centers.push_back(std::move(*next[j]));
  out.log_z = std::move(log_z);
  out.degenerate = degenerate;
  return out;
}

template <class Fam>
std::vector<std::size_t> dsq_pick_indices(const Fam& fam, std::int32_t k,
                                          std::mt19937_64& rng) {
  const std::size_t n = fam.size();
  std::vector<std::size_t> picks;
  picks.reserve(static_cast<std::size_t>(k));
  picks.push_back(uniform_index(rng, n));
  if (k == 1) return picks;

  std::vector<double> min_w(n, kInf);
  auto absorb = [&](std::size_t idx) {
    const auto c = fam.datum_center(idx);
    for (std::size_t i = 0; i < n; ++i) {
      min_w[i] = std::min(min_w[i], fam.seed_weight(c, i));
    }
  };
  absorb(picks[0]);

  for (std::int32_t t = 1; t < k; ++t) {
    double max_finite = 0.0;
    for (double w : min_w) {
      if (std::isfinite(w)) max_finite = std::max(max_finite, w);
    }
    const double cap = max_finite + 1.0;
    double total = 0.0;
    for (double w : min_w) total += std::isfinite(w) ? w : cap;
    std::size_t pick;
    if (total > 0.0) {
      const double u = uniform01(rng) * total;
      double cum = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        cum += std::isfinite(min_w[i]) ? min_w[i] : cap;
        if (u < cum) {
          pick = i;
          break;
        }
      }
    } else {
      pick = uniform_index(rng, n);  // every datum already coincides with a center
    }
    picks.push_back(pick);
    absorb(pick);
  }
  return picks;
}

template <class Fam>
std::vector<typename Fam::Center> seed_centers(const Fam& fam,
                                               const LloydConfig& cfg) {
  auto rng = make_rng(cfg.seed, kSeedStreamTag);
  const std::size_t n = fam.size();
  std::vector<std::size_t> picks;
  if (cfg.init == InitMethod::dsq_seeding) {
    picks = dsq_pick_indices(fam, cfg.k, rng);
  } else {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::int32_t t = 0; t < cfg.k; ++t) {
      const std::size_t r =
          static_cast<std::size_t>(t) +
          uniform_index(rng, n - static_cast<std::size_t>(t));
      std::swap(idx[static_cast<std::size_t>(t)], idx[r]);
      picks.push_back(idx[static_cast<std::size_t>(t)]);
    }
  }
  std::vector<typename Fam::Center> centers;
  centers.reserve(picks.size());
  for (std::size_t p : picks) centers.push_back(fam.datum_center(p));
  return centers;
}

template <class Fam>
struct EngineReport {
  std::vector<typename Fam::Center> centers;
  std::vector<double> log_z;
  Labeling labeling;
  std::vector<double> trace;
  std::int32_t iterations = 0;
  bool converged = false;
  bool degenerate = false;
};

template <class Fam>
EngineReport<Fam> run_lloyd(const Fam& fam, const LloydConfig& cfg) {
  cfg.validate(static_cast<Eigen::Index>(fam.size()));
  EngineReport<Fam> rep;
  rep.centers = seed_centers(fam, cfg);
  rep.log_z.assign(static_cast<std::size_t>(cfg.k), 0.0);
  rep.trace.push_back(criterion_impl(fam, rep.centers, cfg.threads));

  for (std::int32_t t = 1; t <= cfg.max_iters; ++t) {
    bool all_inf = false;
    Labeling labels = assign_impl(fam, rep.centers, cfg.threads, &all_inf);
    rep.degenerate = rep.degenerate || all_inf;
    UpdateOut<Fam> upd =
        update_impl(fam, labels, cfg.empty_policy, &rep.centers, &rep.log_z);
    rep.centers = std::move(upd.centers);
    rep.log_z = std::move(upd.log_z);
    rep.degenerate = rep.degenerate || upd.degenerate;

    const double crit = criterion_impl(fam, rep.centers, cfg.threads);
    const double prev = rep.trace.back();
    rep.trace.push_back(crit);
    rep.iterations = t;
    const double decrease = prev == crit ? 0.0 : prev - crit;
    const double threshold =
        std::isinf(crit) ? kInf : cfg.rel_tol * std::abs(crit) + cfg.abs_tol;
    if (decrease <= threshold) {
      rep.converged = true;
      break;
    }
  }

  bool all_inf = false;
  rep.labeling = assign_impl(fam, rep.centers, cfg.threads, &all_inf);
  rep.degenerate = rep.degenerate || all_inf;
  return rep;
}

Eigen::MatrixXd rows_to_matrix(const std::vector<Eigen::RowVectorXd>& rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    m.row(static_cast<Eigen::Index>(j)) = rows[j];
  }
  return m;
}

std::vector<Eigen::RowVectorXd> matrix_to_rows(const Eigen::MatrixXd& m) {
  std::vector<Eigen::RowVectorXd> rows;
  rows.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index j = 0; j < m.rows(); ++j) rows.push_back(m.row(j));
  return rows;
}

void require_dims(const PointSet& points, const Eigen::MatrixXd& centers,
                  const char* where) {
  if (centers.rows() < 1 || centers.cols() != points.dim()) {
    throw invalid_input(std::string(where) + ": centers must be k x d with k >= 1");
  }
  if (!centers.allFinite()) {
    throw invalid_input(std::string(where) + ": centers must be finite");
  }
}

double inv_two_sigma_sq(double sigma, const char* where) {
  if (!(sigma > 0.0)) {
    throw invalid_input(std::string(where) + ": sigma must be positive");
  }
  return 1.0 / (2.0 * sigma * sigma);
}

}  // namespace

void LloydConfig::validate(Eigen::Index n) const {
  if (k < 1) throw invalid_input("lloyd config: k must be >= 1");
  if (static_cast<Eigen::Index>(k) > n) {
    throw invalid_input("lloyd config: k must not exceed the sample size");
  }
  if (max_iters < 1) throw invalid_input("lloyd config: max_iters must be >= 1");
  if (!(rel_tol >= 0.0) || !(abs_tol >= 0.0)) {
    throw invalid_input("lloyd config: tolerances must be nonnegative");
  }
}

Labeling assign_quadratic(const PointSet& points, const Eigen::MatrixXd& centers) {
  require_dims(points, centers, "assign_quadratic");
  GaussianFamily fam{&points.points(), 1.0};
  return assign_impl(fam, matrix_to_rows(centers), 0);
}

Eigen::MatrixXd update_quadratic(const PointSet& points, const Labeling& labels,
                                 std::int32_t k, EmptyClusterPolicy policy,
                                 const Eigen::MatrixXd* previous) {
  labels.validate(points.n());
  if (labels.k != k) throw invalid_input("update_quadratic: labeling k mismatch");
  GaussianFamily fam{&points.points(), 1.0};
  std::vector<Eigen::RowVectorXd> prev_rows;
  if (previous) prev_rows = matrix_to_rows(*previous);
  auto out = update_impl(fam, labels, policy, previous ? &prev_rows : nullptr,
                         nullptr);
  return rows_to_matrix(out.centers);
}

double empirical_risk_quadratic(const PointSet& points,
                                const Eigen::MatrixXd& centers) {
  require_dims(points, centers, "empirical_risk_quadratic");
  GaussianFamily fam{&points.points(), 1.0};
  return criterion_impl(fam, matrix_to_rows(centers), 0);
}

QuadRunReport lloyd_quadratic(const PointSet& points, const LloydConfig& config) {
  GaussianFamily fam{&points.points(), 1.0};
  auto rep = run_lloyd(fam, config);
  QuadRunReport out;
  out.centers = rows_to_matrix(rep.centers);
  out.labeling = std::move(rep.labeling);
  out.criterion_trace = std::move(rep.trace);
  out.iterations_used = rep.iterations;
  out.converged = rep.converged;
  out.criterion = out.criterion_trace.back();
  out.degenerate = rep.degenerate;
  return out;
}

double criterion_c2(const PointSet& points, const Eigen::MatrixXd& centers,
                    double sigma) {
  require_dims(points, centers, "criterion_c2");
  const double inv = inv_two_sigma_sq(sigma, "criterion_c2");
  const Eigen::Index n = points.n();
  std::vector<double> exponents(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = kInf;
    for (Eigen::Index j = 0; j < centers.rows(); ++j) {
      best = std::min(best,
                      (points.points().row(i) - centers.row(j)).squaredNorm());
    }
    exponents[static_cast<std::size_t>(i)] = -best * inv;
  }
  const double lse = logsumexp(exponents) - std::log(static_cast<double>(n));
  return std::max(0.0, -lse / inv);
}

double criterion_r2(const PointSet& points, const Eigen::MatrixXd& centers,
                    double sigma) {
  require_dims(points, centers, "criterion_r2");
  const double inv = inv_two_sigma_sq(sigma, "criterion_r2");
  const Eigen::Index n = points.n();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = kInf;
    for (Eigen::Index j = 0; j < centers.rows(); ++j) {
      best = std::min(best,
                      (points.points().row(i) - centers.row(j)).squaredNorm());
    }
    acc += -std::expm1(-best * inv);
  }
  return acc / (static_cast<double>(n) * inv);
}

Eigen::MatrixXd update_robust(const PointSet& points, const Labeling& labels,
                              const Eigen::MatrixXd& centers, double sigma,
                              EmptyClusterPolicy policy) {
  labels.validate(points.n());
  require_dims(points, centers, "update_robust");
  if (labels.k != centers.rows()) {
    throw invalid_input("update_robust: labeling k mismatch");
  }
  const double inv = inv_two_sigma_sq(sigma, "update_robust");
  const std::size_t k = static_cast<std::size_t>(labels.k);

  std::vector<std::vector<std::int32_t>> members(k);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    members[static_cast<std::size_t>(labels.labels[i])].push_back(
        static_cast<std::int32_t>(i));
  }

  GaussianFamily fam{&points.points(), 1.0};
  std::vector<std::optional<Eigen::RowVectorXd>> next(k);
  std::vector<double> log_z(k, 0.0);
  std::vector<std::size_t> pending;
  for (std::size_t j = 0; j < k; ++j) {
    if (members[j].empty()) {
      if (policy == EmptyClusterPolicy::keep_previous) {
        next[j] = centers.row(static_cast<Eigen::Index>(j));
      } else {
        pending.push_back(j);
      }
      continue;
    }
    // Shift by the in-cluster minimum so the weights cannot all underflow.
    double min_sq = kInf;
    std::vector<double> sq(members[j].size());
    for (std::size_t t = 0; t < members[j].size(); ++t) {
      sq[t] = (points.points().row(members[j][t]) -
               centers.row(static_cast<Eigen::Index>(j)))
                  .squaredNorm();
      min_sq = std::min(min_sq, sq[t]);
    }
    Eigen::RowVectorXd num = Eigen::RowVectorXd::Zero(points.dim());
    double den = 0.0;
    for (std::size_t t = 0; t < members[j].size(); ++t) {
      const double w = std::exp(-(sq[t] - min_sq) * inv);
      num += w * points.points().row(members[j][t]);
      den += w;
    }
    next[j] = num / den;
  }
  if (!pending.empty()) reseed_pending(fam, next, log_z, pending);

  Eigen::MatrixXd out(centers.rows(), centers.cols());
  for (std::size_t j = 0; j < k; ++j) {
    out.row(static_cast<Eigen::Index>(j)) = *next[j];
  }
  return out;
}

QuadRunReport lloyd_robust(const PointSet& points, const LloydConfig& config,
                           double sigma) {
  inv_two_sigma_sq(sigma, "lloyd_robust");
  config.validate(points.n());
  GaussianFamily fam{&points.points(), 1.0};

  QuadRunReport out;
  out.centers = rows_to_matrix(seed_centers(fam, config));
  out.criterion_trace.push_back(criterion_c2(points, out.centers, sigma));

  for (std::int32_t t = 1; t <= config.max_iters; ++t) {
    Labeling labels = assign_quadratic(points, out.centers);
    out.centers =
        update_robust(points, labels, out.centers, sigma, config.empty_policy);
    const double crit = criterion_c2(points, out.centers, sigma);
    const double prev = out.criterion_trace.back();
    out.criterion_trace.push_back(crit);
    out.iterations_used = t;
    const double decrease = prev == crit ? 0.0 : prev - crit;
    if (decrease <= config.rel_tol * std::abs(crit) + config.abs_tol) {
      out.converged = true;
      break;
    }
  }

  out.labeling = assign_quadratic(points, out.centers);
  out.criterion = out.criterion_trace.back();
  out.criterion_r2 = criterion_r2(points, out.centers, sigma);
  return out;
}

Labeling assign_info(std::span<const Density> data,
                     std::span<const Density> centers) {
  if (data.empty() || centers.empty()) {
    throw invalid_input("assign_info: data and centers must be nonempty");
  }
  HistogramFamily fam{data};
  std::vector<Density> cs(centers.begin(), centers.end());
  return assign_impl(fam, cs, 0);
}

Labeling assign_info(const PointSet& points, const Eigen::MatrixXd& centers,
                     double sigma) {
  require_dims(points, centers, "assign_info");
  GaussianFamily fam{&points.points(), inv_two_sigma_sq(sigma, "assign_info")};
  return assign_impl(fam, matrix_to_rows(centers), 0);
}

Labeling assign_info(const PointSet& points,
                     const GaussianLocationParams& centers) {
  return assign_info(points, centers.means, centers.sigma);
}

InfoUpdateResult update_info(std::span<const Density> data,
                             const Labeling& labels, std::int32_t k,
                             EmptyClusterPolicy policy,
                             const QuantizerDensity* previous) {
  labels.validate(static_cast<Eigen::Index>(data.size()));
  if (labels.k != k) throw invalid_input("update_info: labeling k mismatch");
  HistogramFamily fam{data};
  std::vector<Density> prev_centers;
  std::vector<double> prev_log_z;
  if (previous) {
    prev_centers = previous->centers;
    prev_log_z = previous->log_normalizers;
  }
  auto upd = update_impl(fam, labels, policy,
                         previous ? &prev_centers : nullptr,
                         previous ? &prev_log_z : nullptr);
  InfoUpdateResult out;
  out.centers.centers = std::move(upd.centers);
  out.centers.log_normalizers = std::move(upd.log_z);
  out.degenerate = upd.degenerate;
  return out;
}

Eigen::MatrixXd update_info_gaussian(const PointSet& points,
                                     const Labeling& labels, std::int32_t k,
                                     EmptyClusterPolicy policy,
                                     const Eigen::MatrixXd* previous) {
  labels.validate(points.n());
  if (labels.k != k) {
    throw invalid_input("update_info_gaussian: labeling k mismatch");
  }
  GaussianFamily fam{&points.points(), 1.0};
  std::vector<Eigen::RowVectorXd> prev_rows;
  if (previous) prev_rows = matrix_to_rows(*previous);
  auto out = update_impl(fam, labels, policy, previous ? &prev_rows : nullptr,
                         nullptr);
  return rows_to_matrix(out.centers);
}

ExtendedReal criterion_info(std::span<const Density> data,
                            std::span<const Density> centers) {
  if (data.empty() || centers.empty()) {
    throw invalid_input("criterion_info: data and centers must be nonempty");
  }
  HistogramFamily fam{data};
  std::vector<Density> cs(centers.begin(), centers.end());
  const double v = criterion_impl(fam, cs, 0);
  return std::isinf(v) ? ExtendedReal::infinity() : ExtendedReal(v);
}

ExtendedReal criterion_info(const PointSet& points,
                            const Eigen::MatrixXd& centers, double sigma) {
  require_dims(points, centers, "criterion_info");
  GaussianFamily fam{&points.points(),
                     inv_two_sigma_sq(sigma, "criterion_info")};
  return ExtendedReal(criterion_impl(fam, matrix_to_rows(centers), 0));
}

ExtendedReal criterion_info(const PointSet& points,
                            const GaussianLocationParams& centers) {
  return criterion_info(points, centers.means, centers.sigma);
}

InfoRunReport lloyd_info(std::span<const Density> data,
                         const LloydConfig& config) {
  if (data.empty()) throw invalid_input("lloyd_info: data must be nonempty");
  HistogramFamily fam{data};
  auto rep = run_lloyd(fam, config);
  InfoRunReport out;
  out.centers.centers = std::move(rep.centers);
  out.centers.log_normalizers = std::move(rep.log_z);
  out.labeling = std::move(rep.labeling);
  out.criterion_trace = std::move(rep.trace);
  out.iterations_used = rep.iterations;
  out.converged = rep.converged;
  out.criterion = out.criterion_trace.back();
  out.degenerate = rep.degenerate;
  return out;
}

QuadRunReport lloyd_info_gaussian(const PointSet& points,
                                  const LloydConfig& config, double sigma) {
  GaussianFamily fam{&points.points(),
                     inv_two_sigma_sq(sigma, "lloyd_info_gaussian")};
  auto rep = run_lloyd(fam, config);
  QuadRunReport out;
  out.centers = rows_to_matrix(rep.centers);
  out.labeling = std::move(rep.labeling);
  out.criterion_trace = std::move(rep.trace);
  out.per_cluster_log_z = std::move(rep.log_z);
  out.iterations_used = rep.iterations;
  out.converged = rep.converged;
  out.criterion = out.criterion_trace.back();
  out.degenerate = rep.degenerate;
  return out;
}

std::vector<std::size_t> dsq_seeding(std::span<const Density> data,
                                     std::int32_t k, std::uint64_t seed) {
  if (data.empty()) throw invalid_input("dsq_seeding: data must be nonempty");
  if (k < 1 || static_cast<std::size_t>(k) > data.size()) {
    throw invalid_input("dsq_seeding: need 1 <= k <= n");
  }
  HistogramFamily fam{data};
  auto rng = make_rng(seed, kSeedStreamTag);
  return dsq_pick_indices(fam, k, rng);
}

std::vector<std::size_t> dsq_seeding(const PointSet& points, std::int32_t k,
                                     std::uint64_t seed) {
  if (k < 1 || static_cast<Eigen::Index>(k) > points.n()) {
    throw invalid_input("dsq_seeding: need 1 <= k <= n");
  }
  GaussianFamily fam{&points.points(), 1.0};
  auto rng = make_rng(seed, kSeedStreamTag);
  return dsq_pick_indices(fam, k, rng);
}

std::vector<L2MembershipItem> l2_membership_check(std::span<const Density> data,
                                                  const Labeling& labels) {
  labels.validate(static_cast<Eigen::Index>(data.size()));
  const std::size_t n = data.size();
  const std::size_t k = static_cast<std::size_t>(labels.k);
  const auto& nu = *data[0].measure();

  double mean_sq_mass = 0.0;  // (1/n) sum_i integral p_i^2 dnu
  for (const Density& p : data) {
    double m2 = 0.0;
    for (Eigen::Index y = 0; y < p.size(); ++y) {
      if (p.has_support(y)) m2 += std::exp(2.0 * p.log_value(y)) * nu.weight(y);
    }
    mean_sq_mass += m2;
  }
  mean_sq_mass /= static_cast<double>(n);

  std::vector<std::vector<std::int32_t>> members(k);
  for (std::size_t i = 0; i < n; ++i) {
    members[static_cast<std::size_t>(labels.labels[i])].push_back(
        static_cast<std::int32_t>(i));
  }

  std::vector<L2MembershipItem> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    L2MembershipItem item;
    item.cluster = static_cast<std::int32_t>(j);
    if (members[j].empty()) {
      item.defined = false;
      out.push_back(item);
      continue;
    }
    std::vector<Density> cluster;
    for (std::int32_t i : members[j]) cluster.push_back(data[static_cast<std::size_t>(i)]);
    Eigen::ArrayXd w = Eigen::ArrayXd::Constant(
        static_cast<Eigen::Index>(cluster.size()),
        1.0 / static_cast<double>(cluster.size()));
    w /= w.sum();
    GeometricMeanResult gm = geometric_mean(cluster, w);
    if (!gm.q_star) {
      item.defined = false;
      out.push_back(item);
      continue;
    }
    double lhs = 0.0;
    for (Eigen::Index y = 0; y < gm.q_star->size(); ++y) {
      if (gm.q_star->has_support(y)) {
        lhs += std::exp(2.0 * gm.q_star->log_value(y)) * nu.weight(y);
      }
    }
    const double cluster_prob =
        static_cast<double>(members[j].size()) / static_cast<double>(n);
    item.lhs = lhs;
    item.rhs = std::exp(-2.0 * gm.log_normalizer) / cluster_prob * mean_sq_mass;
    out.push_back(item);
  }
  return out;
}

}  // namespace ikm
