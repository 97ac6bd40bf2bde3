#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stream_al/linalg.hpp"

namespace stream_al {

/// Which flavour of prediction variance to report for a candidate point.
struct VarianceMode {
  enum class Kind { kUnscaled, kScaled, kFull };
  Kind kind = Kind::kUnscaled;
  double sigma2 = 1.0;  // only read for kFull

  static VarianceMode unscaled() { return {Kind::kUnscaled, 1.0}; }
  static VarianceMode scaled() { return {Kind::kScaled, 1.0}; }
  static VarianceMode full(double sigma2) { return {Kind::kFull, sigma2}; }
};

/// Labeled training set with its Gram matrix X^T X + lambda I and the inverse
/// of that matrix, both maintained incrementally as points are added.
///
/// Also keeps X^T y, the column sums of X and the sum of y so that a least
/// squares fit (with or without intercept) costs O(p^2) per refit.
class LabeledDesign {
 public:
  /// Throws UnderdeterminedError when n < p and ridge_lambda == 0, and
  /// SingularityError when the Gram matrix cannot be inverted.
  static LabeledDesign create(std::vector<Vector> points, Vector labels, double ridge_lambda = 0.0);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dimension() const noexcept { return dim_; }
  double ridge_lambda() const noexcept { return ridge_lambda_; }

  const std::vector<Vector>& points() const noexcept { return points_; }
  const Vector& labels() const noexcept { return labels_; }
  const Matrix& gram() const noexcept { return gram_; }
  const Matrix& gram_inv() const noexcept { return gram_inv_; }
  const Vector& xty() const noexcept { return xty_; }
  const Vector& column_sums() const noexcept { return column_sums_; }
  double label_sum() const noexcept { return label_sum_; }

  /// Adds (x, y); the inverse is refreshed with a rank-one update.
  void augment(std::span<const double> x, double y);

  /// x^T (X^T X)^{-1} x, scaled according to `mode`.
  double prediction_variance(std::span<const double> x, VarianceMode mode = VarianceMode::unscaled()) const;

  /// x^T (X^T W X + lambda I)^{-1} x with W = diag(weights).
  double weighted_upv(std::span<const double> x, std::span<const double> weights) const;

  /// x_i^T (X^T X)^{-1} x_i for an in-design row.
  double leverage(std::size_t i) const;

 private:
  LabeledDesign() = default;
  void check_dim(std::span<const double> x, const char* who) const;

  std::size_t dim_ = 0;
  double ridge_lambda_ = 0.0;
  std::vector<Vector> points_;
  Vector labels_;
  Matrix gram_;
  Matrix gram_inv_;
  Vector xty_;
  Vector column_sums_;
  double label_sum_ = 0.0;
};

inline LabeledDesign new_design(std::vector<Vector> points, Vector labels, double ridge_lambda = 0.0) {
  return LabeledDesign::create(std::move(points), std::move(labels), ridge_lambda);
}

/// Value-returning form of LabeledDesign::augment.
LabeledDesign augment_with(LabeledDesign d, std::span<const double> x, double y);

/// log|X^T X + x x^T| - log|X^T X| computed from the current inverse:
/// log(1 + UPV(x)). Equal to the log-determinant gain of adding x.
double logdet_gain(const LabeledDesign& d, std::span<const double> x);

}  // namespace stream_al
