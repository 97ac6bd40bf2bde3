#pragma once

#include <span>

#include "stream_al/linalg.hpp"

namespace stream_al {

/// One-dimensional Gaussian kernel density estimate over informativeness
/// scores.
struct KdeModel {
  Vector samples;
  double bandwidth = 0.0;

  double cdf(double t) const;
  double density(double t) const;
};

/// Silverman's rule of thumb: 0.9 * min(sd, IQR / 1.34) * n^{-1/5}. Falls back
/// to the sample standard deviation when the IQR is zero.
double silverman_bandwidth(std::span<const double> scores);

/// Throws DegenerateKdeError if fewer than two distinct scores are given.
KdeModel fit_kde(std::span<const double> scores);
KdeModel fit_kde(std::span<const double> scores, double bandwidth);

/// Gamma with cdf(Gamma) = 1 - alpha, solved by bisection to 1e-12 in
/// probability. Requires 0 < alpha < 1.
double upper_alpha_quantile(const KdeModel& k, double alpha);

/// Sample quantile with (n + 1) p plotting positions, clamped to the range.
double sample_quantile(std::span<const double> sorted, double prob);

}  // namespace stream_al
