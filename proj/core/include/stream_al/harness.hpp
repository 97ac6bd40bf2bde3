#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stream_al/datagen.hpp"
#include "stream_al/engine.hpp"
#include "stream_al/strategy.hpp"

namespace stream_al {

enum class ScenarioKind { kSynthetic, kCsv };

/// Flat key = value experiment description; see README for the key list.
struct HarnessConfig {
  ScenarioKind scenario = ScenarioKind::kSynthetic;
  SyntheticSpec synthetic;
  std::string input_cov = "identity";  // identity | ar1:<rho> | equicorr:<rho>
  CsvScenarioSpec csv;
  std::vector<StrategyKind> strategies{StrategyKind::kCdo, StrategyKind::kNormThreshold,
                                       StrategyKind::kRandom};
  std::size_t replications = 1;
  EngineConfig engine;  // engine.seed is the base seed
  std::filesystem::path output_dir = "out";
  std::size_t workers = 0;  // 0 = available parallelism
  bool pct_diff = true;
  bool timing = false;
  bool plot = false;
};

/// Throws ConfigError with the offending line on unknown keys or bad values.
HarnessConfig parse_config(std::string_view text);
HarnessConfig load_config(const std::filesystem::path& path);
/// STREAM_AL_SEED, when set, replaces the base seed.
void apply_environment(HarnessConfig& cfg);
/// Canonical text form, parseable by parse_config.
std::string render_config(const HarnessConfig& cfg);

/// Names accepted by profile_config.
std::vector<std::string> profile_names();
/// Ready-made configs for the reference scenarios; throws ConfigError for an
/// unknown name.
std::string profile_config(std::string_view profile);

struct CurvePoint {
  StrategyKind strategy = StrategyKind::kRandom;
  std::size_t step = 0;
  std::size_t labels_used = 0;
  double mean_rmse = 0.0;
  double std_rmse = 0.0;
  double mean_pct_diff_vs_random = 0.0;  // NaN when not computed
  double mean_decision_ms = 0.0;
};

struct AggregatedCurves {
  std::vector<CurvePoint> rows;  // ordered by strategy, then step

  const CurvePoint* find(StrategyKind kind, std::size_t step) const;
  std::size_t steps() const;
};

bool operator==(const AggregatedCurves& a, const AggregatedCurves& b);

/// Stepwise means and sample standard deviations per strategy, with records
/// truncated to the shortest step count. The percentage RMSE difference is
/// computed per replication against the Random record of the same
/// replication, then averaged. Throws ConfigError if `pct_diff` is requested
/// without a Random arm.
AggregatedCurves aggregate(const std::map<StrategyKind, std::vector<ExperimentRecord>>& records,
                           bool pct_diff = true);

void write_curves_csv(std::ostream& os, const AggregatedCurves& curves);
AggregatedCurves read_curves_csv(std::istream& is);

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(std::istream& is);

void write_decisions_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);

/// Line chart of the %diff curves (or mean RMSE when %diff is absent).
std::string render_svg(const AggregatedCurves& curves);

std::map<StrategyKind, std::vector<ExperimentRecord>> group_by_strategy(
    const std::vector<ExperimentRecord>& records);

struct HarnessResult {
  AggregatedCurves curves;
  std::vector<ExperimentRecord> records;  // ordered by replication, then strategy
};

/// Runs every (replication, strategy) pair without writing anything.
/// Replication r uses seed base + r for all arms.
HarnessResult run_replications(const HarnessConfig& cfg);

/// run_replications, then writes curves.csv, records.csv, decisions.csv,
/// summary.txt (and curves.svg with `plot`) into cfg.output_dir.
HarnessResult run_harness(const HarnessConfig& cfg);

/// Re-aggregates records.csv in `dir` and rewrites curves.csv.
AggregatedCurves aggregate_directory(const std::filesystem::path& dir, bool pct_diff = true);

/// Shortest round-trip decimal form of a double ("nan" for NaN).
std::string format_double(double v);

}  // namespace stream_al
