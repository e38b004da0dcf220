#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ikm {

/// Raised on any precondition violation; the message names the constraint.
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Finite reference measure: m strictly positive weights summing to one.
class ReferenceMeasure {
 public:
  explicit ReferenceMeasure(Eigen::ArrayXd weights);

  static std::shared_ptr<const ReferenceMeasure> uniform(Eigen::Index m);
  static std::shared_ptr<const ReferenceMeasure> make(Eigen::ArrayXd weights);

  Eigen::Index size() const { return weights_.size(); }
  const Eigen::ArrayXd& weights() const { return weights_; }
  double weight(Eigen::Index i) const { return weights_[i]; }

  /// Same measure = same object or bitwise-equal weight vectors.
  bool same_as(const ReferenceMeasure& other) const;

 private:
  Eigen::ArrayXd weights_;
};

using MeasurePtr = std::shared_ptr<const ReferenceMeasure>;

/// Probability density on a finite support, stored in log domain.
/// Zero-mass atoms carry -infinity log values; there is no small floor,
/// so domination failures stay visible to the divergence code.
class Density {
 public:
  Density(Eigen::ArrayXd log_values, MeasurePtr nu);

  Eigen::Index size() const { return log_values_.size(); }
  const Eigen::ArrayXd& log_values() const { return log_values_; }
  double log_value(Eigen::Index i) const { return log_values_[i]; }
  double value(Eigen::Index i) const { return std::exp(log_values_[i]); }
  bool has_support(Eigen::Index i) const {
    return log_values_[i] > -std::numeric_limits<double>::infinity();
  }
  const MeasurePtr& measure() const { return nu_; }

  /// Values-on-atoms view (exp of the log values), handy for output.
  Eigen::ArrayXd values() const { return log_values_.exp(); }

 private:
  Eigen::ArrayXd log_values_;
  MeasurePtr nu_;
};

/// Normalizes nonnegative weights into a density with respect to nu.
/// Zero weights become -infinity log values. All-zero input is rejected.
Density make_density(const Eigen::ArrayXd& weights, MeasurePtr nu);

/// n points in R^d with a certified norm bound: max_i ||x_i|| <= bound().
class PointSet {
 public:
  PointSet(Eigen::MatrixXd points, double bound);

  Eigen::Index n() const { return points_.rows(); }
  Eigen::Index dim() const { return points_.cols(); }
  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::RowVectorXd row(Eigen::Index i) const { return points_.row(i); }
  double bound() const { return bound_; }

 private:
  Eigen::MatrixXd points_;
  double bound_;
};

/// Checks finiteness and the optional claimed norm bound. Without a claim
/// the bound is set to the observed max norm; with one, it is verified
/// (violations name the offending point index). Idempotent.
PointSet validate_pointset(const Eigen::MatrixXd& points,
                           std::optional<double> claimed_bound = std::nullopt);

/// Cluster assignment; labels are 0-based indices into [0, k).
struct Labeling {
  std::vector<std::int32_t> labels;
  std::int32_t k = 1;

  void validate(Eigen::Index expected_n = -1) const;
};

/// k plain centers in R^d, one per row.
struct QuantizerQuadratic {
  Eigen::MatrixXd centers;
};

/// k density centers over a shared reference measure. log_normalizers
/// is populated when the centers came out of a centroid update.
struct QuantizerDensity {
  std::vector<Density> centers;
  std::vector<double> log_normalizers;
};

/// Implicit product-Gaussian centers: means plus a shared scale.
struct GaussianLocationParams {
  double sigma = 1.0;
  Eigen::MatrixXd means;
};

}  // namespace ikm
