#include "stream_al/whitening.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stream_al/errors.hpp"

namespace stream_al {

Matrix sample_covariance(std::span<const Vector> rows) {
  if (rows.size() < 2) throw InsufficientWarmupError("sample_covariance: need at least two rows");
  const std::size_t p = rows.front().size();
  const double n = static_cast<double>(rows.size());
  Vector mu(p, 0.0);
  for (const auto& r : rows) {
    if (r.size() != p) throw DimensionError("sample_covariance: rows have differing dimensions");
    for (std::size_t j = 0; j < p; ++j) mu[j] += r[j];
  }
  for (double& m : mu) m /= n;
  Matrix cov(p, p);
  for (const auto& r : rows) {
    for (std::size_t a = 0; a < p; ++a) {
      const double da = r[a] - mu[a];
      for (std::size_t b = a; b < p; ++b) cov(a, b) += da * (r[b] - mu[b]);
    }
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a; b < p; ++b) {
      cov(a, b) /= (n - 1.0);
      cov(b, a) = cov(a, b);
    }
  }
  return cov;
}

WhiteningTransform fit_whitener(std::span<const Vector> warmup, bool standardize) {
  if (warmup.empty()) throw InsufficientWarmupError("fit_whitener: empty warm-up set");
  const std::size_t p = warmup.front().size();
  if (warmup.size() < p + 1) {
    throw InsufficientWarmupError("fit_whitener: " + std::to_string(warmup.size()) +
                                  " warm-up rows for " + std::to_string(p) + " features (need p+1)");
  }
  for (const auto& r : warmup) {
    if (r.size() != p) throw DimensionError("fit_whitener: rows have differing dimensions");
  }

  WhiteningTransform t;
  t.mean.assign(p, 0.0);
  t.scale.assign(p, 1.0);
  std::vector<Vector> scaled(warmup.begin(), warmup.end());
  if (standardize) {
    const Matrix cov = sample_covariance(warmup);
    const double n = static_cast<double>(warmup.size());
    for (const auto& r : warmup)
      for (std::size_t j = 0; j < p; ++j) t.mean[j] += r[j];
    for (std::size_t j = 0; j < p; ++j) {
      t.mean[j] /= n;
      const double sd = std::sqrt(cov(j, j));
      double magnitude = std::abs(t.mean[j]);
      for (const auto& r : warmup) magnitude = std::max(magnitude, std::abs(r[j]));
      if (!(sd > 1e-12 * std::max(1.0, magnitude))) {
        throw DegenerateFeatureError("fit_whitener: feature " + std::to_string(j) +
                                     " has zero variance in the warm-up set");
      }
      t.scale[j] = sd;
    }
    for (auto& r : scaled)
      for (std::size_t j = 0; j < p; ++j) r[j] = (r[j] - t.mean[j]) / t.scale[j];
  }

  SymEig eig = sym_eig(sample_covariance(scaled));
  const double floor = kEigenvalueFloor * std::max(eig.values.front(), 0.0);
  if (!(eig.values.front() > 0.0)) {
    throw DegenerateFeatureError("fit_whitener: warm-up covariance is identically zero");
  }
  for (double& v : eig.values) {
    if (v < floor) {
      v = floor;
      t.floored = true;
    }
  }
  t.eigvecs = std::move(eig.vectors);
  t.eigvals = std::move(eig.values);
  return t;
}

Vector whiten(const WhiteningTransform& t, std::span<const double> x) {
  const std::size_t p = t.dimension();
  if (x.size() != p) {
    throw DimensionError("whiten: expected dimension " + std::to_string(p) + ", got " +
                         std::to_string(x.size()));
  }
  Vector centred(p);
  for (std::size_t j = 0; j < p; ++j) centred[j] = (x[j] - t.mean[j]) / t.scale[j];
  Vector z(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < p; ++k) z[k] += t.eigvecs(j, k) * centred[j];
  }
  for (std::size_t k = 0; k < p; ++k) z[k] /= std::sqrt(t.eigvals[k]);
  return z;
}

std::vector<Vector> whiten_all(const WhiteningTransform& t, std::span<const Vector> xs) {
  std::vector<Vector> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(whiten(t, x));
  return out;
}

}  // namespace stream_al
