#include "infokm/core.hpp"

#include <cmath>
#include <string>

namespace ikm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ReferenceMeasure::ReferenceMeasure(Eigen::ArrayXd weights)
    : weights_(std::move(weights)) {
  if (weights_.size() < 1) {
    throw invalid_input("reference measure: support must be nonempty");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      throw invalid_input("reference measure: weight " + std::to_string(i) +
                          " must be strictly positive and finite");
    }
    sum += weights_[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw invalid_input("reference measure: weights must sum to 1 (got " +
                        std::to_string(sum) + ")");
  }
}

std::shared_ptr<const ReferenceMeasure> ReferenceMeasure::uniform(Eigen::Index m) {
  if (m < 1) throw invalid_input("reference measure: support size must be >= 1");
  Eigen::ArrayXd w = Eigen::ArrayXd::Constant(m, 1.0 / static_cast<double>(m));
  // Renormalize once so the sum check cannot trip on 1/m rounding.
  w /= w.sum();
  return std::make_shared<const ReferenceMeasure>(std::move(w));
}

std::shared_ptr<const ReferenceMeasure> ReferenceMeasure::make(Eigen::ArrayXd weights) {
  return std::make_shared<const ReferenceMeasure>(std::move(weights));
}

bool ReferenceMeasure::same_as(const ReferenceMeasure& other) const {
  if (this == &other) return true;
  if (weights_.size() != other.weights_.size()) return false;
  return (weights_ == other.weights_).all();
}

Density::Density(Eigen::ArrayXd log_values, MeasurePtr nu)
    : log_values_(std::move(log_values)), nu_(std::move(nu)) {
  if (!nu_) throw invalid_input("density: reference measure is null");
  if (log_values_.size() != nu_->size()) {
    throw invalid_input("density: log values and reference measure sizes differ");
  }
  double total = 0.0;
  bool any_support = false;
  for (Eigen::Index i = 0; i < log_values_.size(); ++i) {
    const double lv = log_values_[i];
    if (std::isnan(lv) || lv == kInf) {
      throw invalid_input("density: log value " + std::to_string(i) +
                          " must be in [-inf, +inf)");
    }
    if (lv > -kInf) {
      any_support = true;
      total += std::exp(lv) * nu_->weight(i);
    }
  }
  if (!any_support) throw invalid_input("density: empty support");
  if (std::abs(total - 1.0) > 1e-9) {
    throw invalid_input("density: mass " + std::to_string(total) +
                        " is not 1 within 1e-9");
  }
}

Density make_density(const Eigen::ArrayXd& weights, MeasurePtr nu) {
  if (!nu) throw invalid_input("make_density: reference measure is null");
  if (weights.size() != nu->size()) {
    throw invalid_input("make_density: weights and reference measure sizes differ");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw invalid_input("make_density: weight " + std::to_string(i) +
                          " must be finite and nonnegative");
    }
    total += weights[i] * nu->weight(i);
  }
  if (!(total > 0.0)) {
    throw invalid_input("make_density: weights have zero total mass");
  }
  const double log_total = std::log(total);
  Eigen::ArrayXd log_values(weights.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    log_values[i] = weights[i] > 0.0 ? std::log(weights[i]) - log_total : -kInf;
  }
  return Density(std::move(log_values), std::move(nu));
}

PointSet::PointSet(Eigen::MatrixXd points, double bound)
    : points_(std::move(points)), bound_(bound) {}

PointSet validate_pointset(const Eigen::MatrixXd& points,
                           std::optional<double> claimed_bound) {
  if (points.rows() < 1 || points.cols() < 1) {
    throw invalid_input("point set: need n >= 1 and d >= 1");
  }
  double max_norm = 0.0;
  Eigen::Index worst = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (!points.row(i).allFinite()) {
      throw invalid_input("point set: non-finite entry in point " +
                          std::to_string(i));
    }
    const double nrm = points.row(i).norm();
    if (nrm > max_norm) {
      max_norm = nrm;
      worst = i;
    }
  }
  if (claimed_bound) {
    if (!(*claimed_bound >= 0.0)) {
      throw invalid_input("point set: claimed bound must be nonnegative");
    }
    if (max_norm > *claimed_bound + 1e-9) {
      throw invalid_input("point set: point " + std::to_string(worst) +
                          " has norm " + std::to_string(max_norm) +
                          " exceeding claimed bound " +
                          std::to_string(*claimed_bound));
    }
    return PointSet(points, *claimed_bound);
  }
  return PointSet(points, max_norm);
}

void Labeling::validate(Eigen::Index expected_n) const {
  if (k < 1) throw invalid_input("labeling: k must be >= 1");
  if (expected_n >= 0 &&
      static_cast<Eigen::Index>(labels.size()) != expected_n) {
    throw invalid_input("labeling: label count does not match data size");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) {
      throw invalid_input("labeling: label " + std::to_string(i) +
                          " out of range [0, k)");
    }
  }
}

}  // namespace ikm
