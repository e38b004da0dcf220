#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "infokm/core.hpp"
#include "infokm/divergence.hpp"

namespace ikm {

enum class InitMethod { dsq_seeding, random_points };
enum class EmptyClusterPolicy { farthest_point_reseed, keep_previous };

struct LloydConfig {
  std::int32_t k = 1;
  std::int32_t max_iters = 200;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  std::uint64_t seed = 0;
  InitMethod init = InitMethod::dsq_seeding;
  EmptyClusterPolicy empty_policy = EmptyClusterPolicy::farthest_point_reseed;
  int threads = 0;  // 0 = library default

  void validate(Eigen::Index n) const;
};

/// Outcome of a Lloyd run over vector centers. criterion_trace[0] is the
/// criterion of the seeded centers; one more entry per update step. The
/// labeling always matches the final centers.
struct QuadRunReport {
  Eigen::MatrixXd centers;  // k x d
  Labeling labeling;
  std::vector<double> criterion_trace;
  std::vector<double> per_cluster_log_z;  // information runs only
  std::int32_t iterations_used = 0;
  bool converged = false;
  double criterion = 0.0;
  double criterion_r2 = std::numeric_limits<double>::quiet_NaN();  // robust runs
  bool degenerate = false;
};

/// Same shape for density centers.
struct InfoRunReport {
  QuantizerDensity centers;
  Labeling labeling;
  std::vector<double> criterion_trace;
  std::int32_t iterations_used = 0;
  bool converged = false;
  double criterion = 0.0;
  bool degenerate = false;
};

// Quadratic engine ----------------------------------------------------------

/// Nearest-center labels, lowest index on ties.
Labeling assign_quadratic(const PointSet& points, const Eigen::MatrixXd& centers);

/// Per-cluster arithmetic means. Empty clusters follow the policy; the
/// reseed policy moves them to the datum with the largest loss against the
/// already-updated centers. keep_previous requires `previous`.
Eigen::MatrixXd update_quadratic(const PointSet& points, const Labeling& labels,
                                 std::int32_t k, EmptyClusterPolicy policy,
                                 const Eigen::MatrixXd* previous = nullptr);

/// (1/n) sum_i min_j ||x_i - c_j||^2.
double empirical_risk_quadratic(const PointSet& points,
                                const Eigen::MatrixXd& centers);

QuadRunReport lloyd_quadratic(const PointSet& points, const LloydConfig& config);

// Robust engine --------------------------------------------------------------

/// -2 sigma^2 log( (1/n) sum_i exp(-min_j ||x_i - c_j||^2 / (2 sigma^2)) ).
double criterion_c2(const PointSet& points, const Eigen::MatrixXd& centers,
                    double sigma);

/// 2 sigma^2 (1/n) sum_i (1 - exp(-min_j ||x_i - c_j||^2 / (2 sigma^2))).
double criterion_r2(const PointSet& points, const Eigen::MatrixXd& centers,
                    double sigma);

/// Exponentially weighted conditional means; weights are shifted by the
/// in-cluster minimum so they never underflow to an all-zero cluster.
Eigen::MatrixXd update_robust(const PointSet& points, const Labeling& labels,
                              const Eigen::MatrixXd& centers, double sigma,
                              EmptyClusterPolicy policy);

/// Alternates the quadratic assignment with the exponentially weighted
/// update; traces the criterion above and also reports its bounded
/// transform in criterion_r2.
QuadRunReport lloyd_robust(const PointSet& points, const LloydConfig& config,
                           double sigma);

// Information engine ---------------------------------------------------------

/// Lowest-index argmin of K(center_j, datum_i); +inf ranks above every
/// finite value, and an all-infinite row gets label 0 (flagged by callers
/// through the run report).
Labeling assign_info(std::span<const Density> data,
                     std::span<const Density> centers);
Labeling assign_info(const PointSet& points, const Eigen::MatrixXd& centers,
                     double sigma);
Labeling assign_info(const PointSet& points,
                     const GaussianLocationParams& centers);

/// Per-cluster geometric means with uniform in-cluster weights, recording
/// log Z_j. A cluster whose supports intersect in a nu-null set triggers
/// the empty-cluster policy and marks the update degenerate.
struct InfoUpdateResult {
  QuantizerDensity centers;
  bool degenerate = false;
};
InfoUpdateResult update_info(std::span<const Density> data,
                             const Labeling& labels, std::int32_t k,
                             EmptyClusterPolicy policy,
                             const QuantizerDensity* previous = nullptr);

/// Gaussian-location centroids are arithmetic means; the family's
/// normalizers cancel, so log Z bookkeeping is zero.
Eigen::MatrixXd update_info_gaussian(const PointSet& points,
                                     const Labeling& labels, std::int32_t k,
                                     EmptyClusterPolicy policy,
                                     const Eigen::MatrixXd* previous = nullptr);

/// (1/n) sum_i min_j K(center_j, datum_i).
ExtendedReal criterion_info(std::span<const Density> data,
                            std::span<const Density> centers);
ExtendedReal criterion_info(const PointSet& points,
                            const Eigen::MatrixXd& centers, double sigma);
ExtendedReal criterion_info(const PointSet& points,
                            const GaussianLocationParams& centers);

InfoRunReport lloyd_info(std::span<const Density> data,
                         const LloydConfig& config);
QuadRunReport lloyd_info_gaussian(const PointSet& points,
                                  const LloydConfig& config, double sigma);

// Seeding ---------------------------------------------------------------------

/// Divergence-proportional seeding: first pick uniform, then each next
/// datum with probability proportional to its current minimum divergence
/// (+inf capped at the max finite value plus one). Returns datum indices.
std::vector<std::size_t> dsq_seeding(std::span<const Density> data,
                                     std::int32_t k, std::uint64_t seed);
std::vector<std::size_t> dsq_seeding(const PointSet& points, std::int32_t k,
                                     std::uint64_t seed);

// Diagnostics ------------------------------------------------------------------

/// Jensen control of the optimal centers' L2 mass: per nonempty cluster,
/// integral of the squared centroid against the integral bound
/// Z_j^-2 (n/|cluster|) mean_i integral(p_i^2).
struct L2MembershipItem {
  std::int32_t cluster = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool defined = true;  // false for empty clusters or Z_j = 0
};
std::vector<L2MembershipItem> l2_membership_check(std::span<const Density> data,
                                                  const Labeling& labels);

}  // namespace ikm
