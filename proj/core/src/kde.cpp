#include "stream_al/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stream_al/errors.hpp"

namespace stream_al {

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

double KdeModel::cdf(double t) const {
  double s = 0.0;
  for (double x : samples) s += std_normal_cdf((t - x) / bandwidth);
  return s / static_cast<double>(samples.size());
}

double KdeModel::density(double t) const {
  const double norm = 1.0 / (bandwidth * std::sqrt(2.0 * std::numbers::pi));
  double s = 0.0;
  for (double x : samples) {
    const double u = (t - x) / bandwidth;
    s += std::exp(-0.5 * u * u);
  }
  return norm * s / static_cast<double>(samples.size());
}

double sample_quantile(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw DomainError("sample_quantile: empty sample");
  const double n = static_cast<double>(sorted.size());
  const double pos = std::clamp(prob * (n + 1.0), 1.0, n) - 1.0;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double silverman_bandwidth(std::span<const double> scores) {
  const std::size_t n = scores.size();
  if (n < 2) throw DegenerateKdeError("fit_kde: need at least two scores");
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  Vector sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = sample_quantile(sorted, 0.75) - sample_quantile(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

KdeModel fit_kde(std::span<const double> scores) {
  if (scores.size() < 2) throw DegenerateKdeError("fit_kde: need at least two scores");
  for (double s : scores) {
    if (!std::isfinite(s)) throw DegenerateKdeError("fit_kde: non-finite score");
  }
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  if (*lo == *hi) throw DegenerateKdeError("fit_kde: all scores are identical");
  return fit_kde(scores, silverman_bandwidth(scores));
}

KdeModel fit_kde(std::span<const double> scores, double bandwidth) {
  if (scores.empty()) throw DegenerateKdeError("fit_kde: no scores");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw DegenerateKdeError("fit_kde: bandwidth must be positive, got " + std::to_string(bandwidth));
  }
  return KdeModel{Vector(scores.begin(), scores.end()), bandwidth};
}

double upper_alpha_quantile(const KdeModel& k, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("upper_alpha_quantile: alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  const auto [mn, mx] = std::minmax_element(k.samples.begin(), k.samples.end());
  double lo = *mn - 10.0 * k.bandwidth;
  double hi = *mx + 10.0 * k.bandwidth;
  const double target = 1.0 - alpha;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = k.cdf(mid);
    if (std::abs(f - target) <= 1e-12) break;
    if (f < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  return mid;
}

}  // namespace stream_al
