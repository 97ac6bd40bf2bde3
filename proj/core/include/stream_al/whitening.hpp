#pragma once

#include <span>
#include <vector>

#include "stream_al/linalg.hpp"

namespace stream_al {

/// Affine map z = Lambda^{-1/2} U^T ((x - mean) / scale) fitted on a warm-up
/// segment. Immutable once fitted.
struct WhiteningTransform {
  Vector mean;     // zeros when fitted without standardisation
  Vector scale;    // ones when fitted without standardisation
  Matrix eigvecs;  // U, columns orthonormal
  Vector eigvals;  // Lambda, descending, floored
  bool floored = false;  // true if any eigenvalue was clipped to the floor

  std::size_t dimension() const noexcept { return eigvals.size(); }
};

/// Relative eigenvalue floor applied before Lambda^{-1/2}.
inline constexpr double kEigenvalueFloor = 1e-10;

/// Fits the transform on `warmup` (n >= p + 1 rows). With `standardize` the
/// data are centred and divided by the per-feature sample standard deviation
/// before the covariance (divisor n - 1) is decomposed.
WhiteningTransform fit_whitener(std::span<const Vector> warmup, bool standardize);

Vector whiten(const WhiteningTransform& t, std::span<const double> x);
std::vector<Vector> whiten_all(const WhiteningTransform& t, std::span<const Vector> xs);

/// Sample covariance with divisor n - 1.
Matrix sample_covariance(std::span<const Vector> rows);

}  // namespace stream_al
