#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stream_al/design.hpp"
#include "stream_al/strategy.hpp"
#include "stream_al/stream.hpp"
#include "stream_al/whitening.hpp"

namespace stream_al {

struct EngineConfig {
  std::size_t warmup_len = 500;
  double alpha = 0.1;
  std::size_t budget = 50;
  std::size_t initial_design_size = 0;  // 0 means p + 2
  double ridge_lambda = 0.0;
  bool intercept = false;
  bool standardize = false;
  std::size_t test_size = 500;
  std::uint64_t seed = 0;
  /// Re-estimate Gamma after each accepted label.
  bool refresh_threshold = true;
  /// Wall-clock each decide() call. Off makes records bit-reproducible.
  bool measure_time = true;
  bool record_decisions = true;

  std::size_t design_size_for(std::size_t p) const {
    return initial_design_size == 0 ? p + 2 : initial_design_size;
  }
};

/// Throws ConfigError when the configuration cannot work for dimension p.
void validate(const EngineConfig& cfg, std::size_t p);

struct StepRow {
  std::size_t step = 0;
  std::size_t labels_used = 0;
  double rmse = 0.0;
  std::uint64_t scanned = 0;        // selection-phase points seen so far
  double mean_decision_ms = 0.0;    // over decisions since the previous step
};

struct DecisionRow {
  std::uint64_t arrival_index = 0;
  double score = 0.0;
  double threshold = 0.0;
  bool selected = false;
};

struct ExperimentRecord {
  StrategyKind strategy = StrategyKind::kRandom;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  std::vector<StepRow> steps;  // step 0 is the initial model
  std::vector<DecisionRow> decisions;
  std::size_t selected_count = 0;
  std::uint64_t scanned = 0;
  double mean_decision_ms = 0.0;
  bool incomplete = false;
  std::string incomplete_reason;
  bool ridge_fallback = false;
  bool whitening_floored = false;
};

struct WarmupResult {
  WhiteningTransform transform;
  std::vector<Vector> warmup;  // V, whitened
  std::vector<Vector> design;  // Z, whitened initial design
};

/// Consumes the first cfg.warmup_len stream points (never labelled), fits the
/// whitener on them and maps both the warm-up set and the initial design.
WarmupResult run_warmup(StreamSource& src, const EngineConfig& cfg,
                        std::span<const Vector> initial_design);

/// Instance-selection loop: scans until the budget is spent or the stream
/// ends. `test` must already be whitened. Records step 0 (the model on the
/// initial design) before scanning.
ExperimentRecord run_selection(StreamSource& src, const LabelOracle& oracle, QueryStrategy& strategy,
                               LabeledDesign& design, const WhiteningTransform& transform,
                               const TestSet& test, const EngineConfig& cfg);

/// Builds the initial design, retrying with a small ridge term if the plain
/// Gram matrix is singular. Sets `fallback` when the retry was needed.
LabeledDesign build_initial_design(std::vector<Vector> points, Vector labels, double ridge_lambda,
                                   bool& fallback);

/// Full run for one replication and strategy: instantiate, warm up, fit,
/// calibrate, select.
ExperimentRecord run_experiment(const Scenario& scenario, const EngineConfig& cfg, StrategyKind kind,
                                std::size_t replication = 0);

/// Seed for the Random arm's generator, derived from the replication seed.
std::uint64_t random_arm_seed(std::uint64_t seed);

}  // namespace stream_al
