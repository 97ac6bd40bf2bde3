#include "stream_al/design.hpp"

#include <cmath>
#include <string>

#include "stream_al/errors.hpp"

namespace stream_al {

LabeledDesign LabeledDesign::create(std::vector<Vector> points, Vector labels, double ridge_lambda) {
  if (points.size() != labels.size()) {
    throw DimensionError("new_design: " + std::to_string(points.size()) + " points but " +
                         std::to_string(labels.size()) + " labels");
  }
  if (points.empty()) throw UnderdeterminedError("new_design: empty design");
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) {
    throw DimensionError("new_design: ridge_lambda must be finite and nonnegative");
  }
  const std::size_t p = points.front().size();
  for (const auto& x : points) {
    if (x.size() != p) throw DimensionError("new_design: points have differing dimensions");
  }
  if (ridge_lambda == 0.0 && points.size() < p) {
    throw UnderdeterminedError("new_design: " + std::to_string(points.size()) +
                               " points cannot determine " + std::to_string(p) + " coefficients");
  }

  LabeledDesign d;
  d.dim_ = p;
  d.ridge_lambda_ = ridge_lambda;
  d.gram_ = Matrix(p, p);
  d.xty_.assign(p, 0.0);
  d.column_sums_.assign(p, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vector& x = points[i];
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = a; b < p; ++b) d.gram_(a, b) += x[a] * x[b];
      d.xty_[a] += x[a] * labels[i];
      d.column_sums_[a] += x[a];
    }
    d.label_sum_ += labels[i];
  }
  for (std::size_t a = 0; a < p; ++a) {
    d.gram_(a, a) += ridge_lambda;
    for (std::size_t b = 0; b < a; ++b) d.gram_(a, b) = d.gram_(b, a);
  }
  d.gram_inv_ = invert_spd(d.gram_);
  d.points_ = std::move(points);
  d.labels_ = std::move(labels);
  return d;
}

void LabeledDesign::check_dim(std::span<const double> x, const char* who) const {
  if (x.size() != dim_) {
    throw DimensionError(std::string(who) + ": expected dimension " + std::to_string(dim_) +
                         ", got " + std::to_string(x.size()));
  }
}

void LabeledDesign::augment(std::span<const double> x, double y) {
  check_dim(x, "augment");
  // Update the inverse first so a degenerate update leaves the design intact.
  sherman_morrison_update_inplace(gram_inv_, x);
  for (std::size_t a = 0; a < dim_; ++a) {
    for (std::size_t b = 0; b < dim_; ++b) gram_(a, b) += x[a] * x[b];
    xty_[a] += x[a] * y;
    column_sums_[a] += x[a];
  }
  label_sum_ += y;
  points_.emplace_back(x.begin(), x.end());
  labels_.push_back(y);
}

double LabeledDesign::prediction_variance(std::span<const double> x, VarianceMode mode) const {
  check_dim(x, "prediction_variance");
  const double upv = quadratic_form(gram_inv_, x);
  switch (mode.kind) {
    case VarianceMode::Kind::kScaled:
      return static_cast<double>(size()) * upv;
    case VarianceMode::Kind::kFull:
      return mode.sigma2 * upv;
    case VarianceMode::Kind::kUnscaled:
      break;
  }
  return upv;
}

double LabeledDesign::weighted_upv(std::span<const double> x, std::span<const double> weights) const {
  check_dim(x, "weighted_upv");
  if (weights.size() != size()) {
    throw DimensionError("weighted_upv: expected " + std::to_string(size()) + " weights, got " +
                         std::to_string(weights.size()));
  }
  Matrix g(dim_, dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    const double w = weights[i];
    if (!(w >= 0.0)) throw DimensionError("weighted_upv: weights must be nonnegative");
    const Vector& xi = points_[i];
    for (std::size_t a = 0; a < dim_; ++a)
      for (std::size_t b = 0; b < dim_; ++b) g(a, b) += w * xi[a] * xi[b];
  }
  for (std::size_t a = 0; a < dim_; ++a) g(a, a) += ridge_lambda_;
  return quadratic_form(invert_spd(g), x);
}

double LabeledDesign::leverage(std::size_t i) const { return quadratic_form(gram_inv_, points_.at(i)); }

LabeledDesign augment_with(LabeledDesign d, std::span<const double> x, double y) {
  d.augment(x, y);
  return d;
}

double logdet_gain(const LabeledDesign& d, std::span<const double> x) {
  return std::log1p(d.prediction_variance(x));
}

}  // namespace stream_al
