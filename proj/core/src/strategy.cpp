#include "stream_al/strategy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "stream_al/errors.hpp"
#include "stream_al/kde.hpp"

namespace stream_al {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kCdo:
      return "cdo";
    case StrategyKind::kNormThreshold:
      return "norm";
    case StrategyKind::kRandom:
      return "random";
  }
  return "unknown";
}

StrategyKind parse_strategy_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "cdo") return StrategyKind::kCdo;
  if (lower == "norm" || lower == "norm_threshold" || lower == "normthreshold") {
    return StrategyKind::kNormThreshold;
  }
  if (lower == "random") return StrategyKind::kRandom;
  throw ConfigError("unknown strategy '" + std::string(text) + "'");
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

QueryStrategy::QueryStrategy(StrategyKind kind, double alpha, std::uint64_t seed)
    : kind_(kind), alpha_(alpha), rng_(seed) {
  // Random accepts alpha = 1 (select everything); the thresholded strategies
  // need an interior quantile.
  const bool ok = kind == StrategyKind::kRandom ? (alpha > 0.0 && alpha <= 1.0)
                                                : (alpha > 0.0 && alpha < 1.0);
  if (!ok) {
    throw ConfigError("strategy " + std::string(to_string(kind)) + ": alpha " +
                      std::to_string(alpha) + " out of range");
  }
}

QueryStrategy QueryStrategy::cdo(double alpha) { return {StrategyKind::kCdo, alpha, 0}; }

QueryStrategy QueryStrategy::norm_threshold(double alpha) {
  return {StrategyKind::kNormThreshold, alpha, 0};
}

QueryStrategy QueryStrategy::random(double alpha, std::uint64_t seed) {
  return {StrategyKind::kRandom, alpha, seed};
}

QueryStrategy QueryStrategy::make(StrategyKind kind, double alpha, std::uint64_t seed) {
  return {kind, alpha, seed};
}

void QueryStrategy::set_gamma(double gamma) {
  if (!std::isfinite(gamma)) throw StateError("set_gamma: threshold must be finite");
  gamma_ = gamma;
}

Vector QueryStrategy::warmup_scores(const LabeledDesign& d) const {
  Vector scores;
  scores.reserve(warmup_.size());
  for (const auto& v : warmup_) {
    scores.push_back(kind_ == StrategyKind::kCdo ? d.prediction_variance(v) : norm2(v));
  }
  return scores;
}

void QueryStrategy::refresh_threshold(const LabeledDesign& d, std::vector<Vector> warmup) {
  warmup_ = std::move(warmup);
  if (kind_ == StrategyKind::kNormThreshold) gamma_.reset();
  refresh_threshold(d);
}

void QueryStrategy::refresh_threshold(const LabeledDesign& d) {
  if (kind_ == StrategyKind::kRandom) return;
  if (kind_ == StrategyKind::kNormThreshold && gamma_) return;
  if (warmup_.empty()) throw StateError("refresh_threshold: no warm-up set retained");
  const Vector scores = warmup_scores(d);
  const double gamma = upper_alpha_quantile(fit_kde(scores), alpha_);
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw StateError("refresh_threshold: estimated threshold " + std::to_string(gamma) +
                     " is not positive");
  }
  gamma_ = gamma;
}

Decision cdo_decide(const QueryStrategy& s, const LabeledDesign& d, std::span<const double> z) {
  if (!s.gamma()) throw StateError("cdo_decide: threshold not initialised");
  const double score = d.prediction_variance(z);
  return {score >= *s.gamma(), score, *s.gamma()};
}

Decision norm_decide(const QueryStrategy& s, std::span<const double> z) {
  if (!s.gamma()) throw StateError("norm_decide: threshold not initialised");
  const double score = norm2(z);
  return {score >= *s.gamma(), score, *s.gamma()};
}

Decision random_decide(QueryStrategy& s) { return s.decide_random(); }

Decision QueryStrategy::decide_random() {
  if (kind_ != StrategyKind::kRandom) throw StateError("decide_random: not a random strategy");
  const double s = uniform01(rng_);
  const double threshold = 1.0 - alpha_;
  return {s >= threshold, s, threshold};
}

Decision QueryStrategy::decide(const LabeledDesign& d, std::span<const double> z) {
  switch (kind_) {
    case StrategyKind::kCdo:
      return cdo_decide(*this, d, z);
    case StrategyKind::kNormThreshold:
      return norm_decide(*this, z);
    case StrategyKind::kRandom:
      break;
  }
  return decide_random();
}

}  // namespace stream_al
