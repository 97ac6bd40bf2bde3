#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stream_al/design.hpp"
#include "stream_al/linalg.hpp"

namespace stream_al {

enum class StrategyKind { kCdo, kNormThreshold, kRandom };

std::string_view to_string(StrategyKind kind);
/// Accepts "cdo", "norm" / "norm_threshold", "random" (case-insensitive).
StrategyKind parse_strategy_kind(std::string_view text);

struct Decision {
  bool selected = false;
  double score = 0.0;
  double threshold_used = 0.0;
};

/// Stateful query strategy. CDO scores a whitened point by its unscaled
/// prediction variance under the current design, NormThreshold by its
/// Euclidean norm, Random by a uniform draw. The first two compare against a
/// threshold Gamma calibrated on the retained warm-up set so that a fraction
/// alpha of warm-up points would be selected.
class QueryStrategy {
 public:
  static QueryStrategy cdo(double alpha);
  static QueryStrategy norm_threshold(double alpha);
  static QueryStrategy random(double alpha, std::uint64_t seed);
  static QueryStrategy make(StrategyKind kind, double alpha, std::uint64_t seed);

  StrategyKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  std::optional<double> gamma() const noexcept { return gamma_; }
  const std::vector<Vector>& warmup() const noexcept { return warmup_; }

  /// Replaces the retained warm-up set and re-estimates Gamma.
  void refresh_threshold(const LabeledDesign& d, std::vector<Vector> warmup);
  /// Re-estimates Gamma from the retained warm-up set. CDO refits the KDE on
  /// the warm-up UPVs under `d`; NormThreshold only computes Gamma the first
  /// time (norms do not depend on the design); Random is a no-op.
  void refresh_threshold(const LabeledDesign& d);

  /// Sets Gamma directly (tests, replay).
  void set_gamma(double gamma);

  /// Throws StateError if a thresholded strategy has no Gamma yet.
  Decision decide(const LabeledDesign& d, std::span<const double> z);
  /// Random strategy only: one uniform draw, selected iff draw >= 1 - alpha.
  Decision decide_random();

  /// Scores the retained warm-up set the way refresh_threshold does.
  Vector warmup_scores(const LabeledDesign& d) const;

 private:
  QueryStrategy(StrategyKind kind, double alpha, std::uint64_t seed);

  StrategyKind kind_;
  double alpha_;
  std::optional<double> gamma_;
  std::vector<Vector> warmup_;
  std::mt19937_64 rng_;
};

Decision cdo_decide(const QueryStrategy& s, const LabeledDesign& d, std::span<const double> z);
Decision norm_decide(const QueryStrategy& s, std::span<const double> z);
Decision random_decide(QueryStrategy& s);

/// Uniform double in [0, 1) from the top 53 bits of one generator draw.
double uniform01(std::mt19937_64& rng);

}  // namespace stream_al
