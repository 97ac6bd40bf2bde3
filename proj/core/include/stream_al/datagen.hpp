#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stream_al/linalg.hpp"
#include "stream_al/stream.hpp"

namespace stream_al {

/// Which parts of a contaminated observation are shifted.
enum class OutlierMode { kBoth, kInputs, kResponse };

std::string_view to_string(OutlierMode mode);
OutlierMode parse_outlier_mode(std::string_view text);

/// Synthetic linear-Gaussian scenario: x ~ N_p(0, input_cov),
/// beta ~ U(coef_low, coef_high)^p, y = beta^T x + noise_sigma * N(0, 1).
struct SyntheticSpec {
  std::size_t p = 10;
  double coef_low = -5.0;
  double coef_high = 5.0;
  double noise_sigma = 1.0;
  std::optional<Matrix> input_cov;  // identity when empty
  double outlier_rate = 0.0;
  double outlier_shift = 5.0;       // input-space displacement along a random unit vector
  double outlier_response_sigmas = 10.0;  // response shift, in units of noise_sigma
  OutlierMode outlier_mode = OutlierMode::kBoth;
  bool contaminate_initial_design = false;
  std::uint64_t seed = 0;
  std::uint64_t stream_length = 1'000'000;
};

/// Disjoint index spaces drawn from the same generator.
enum class Segment : std::uint64_t { kDesign = 1, kStream = 2, kTest = 3 };

struct SyntheticSample {
  Vector x;
  double y = 0.0;
  bool outlier = false;
};

/// Counter-based generator: every sample is a pure function of
/// (seed, segment, index), so streams can be replayed and labelled lazily.
class SyntheticGenerator {
 public:
  /// Throws ConfigError on an invalid spec and SingularityError when
  /// input_cov is not SPD.
  explicit SyntheticGenerator(SyntheticSpec spec);

  const SyntheticSpec& spec() const noexcept { return spec_; }
  const Vector& beta() const noexcept { return beta_; }

  SyntheticSample sample(Segment segment, std::uint64_t index) const;
  /// Same draw before contamination.
  SyntheticSample clean_sample(Segment segment, std::uint64_t index) const;
  bool is_outlier(Segment segment, std::uint64_t index) const;

 private:
  SyntheticSpec spec_;
  Matrix chol_;
  Vector beta_;
};

struct SyntheticStream {
  std::unique_ptr<StreamSource> stream;
  std::shared_ptr<const LabelOracle> oracle;
  Vector beta;
};

/// Stream segment of the synthetic scenario plus its oracle.
SyntheticStream gen_synthetic(const SyntheticSpec& spec);

class SyntheticScenario final : public Scenario {
 public:
  explicit SyntheticScenario(SyntheticSpec spec);
  std::size_t dimension() const override { return spec_.p; }
  /// `seed` replaces spec.seed.
  ScenarioInstance instantiate(std::uint64_t seed, std::size_t design_size,
                               std::size_t test_size) const override;

 private:
  SyntheticSpec spec_;
};

struct CsvStreamSpec {
  std::filesystem::path path;
  std::vector<std::string> feature_columns;  // empty: every column but the response
  std::string response_column;
  bool has_header = true;
};

/// Parsed CSV: one row per time step.
struct CsvTable {
  std::vector<std::string> feature_names;
  std::vector<Vector> features;
  Vector responses;
};

/// Throws IoError, SchemaError (missing/overlapping columns) or ParseError
/// with the 1-based line and column of the offending cell.
CsvTable read_csv_table(const CsvStreamSpec& spec);

struct CsvStream {
  std::unique_ptr<StreamSource> stream;
  std::shared_ptr<const LabelOracle> oracle;
  std::size_t dimension = 0;
};

/// Rows stream in file order; the oracle returns the response of a row index.
CsvStream csv_stream(const CsvStreamSpec& spec);

/// Stream over rows [begin, end) of a shared table, indexed by row.
std::unique_ptr<StreamSource> table_stream(std::shared_ptr<const CsvTable> table, std::size_t begin,
                                           std::size_t end);
std::shared_ptr<const LabelOracle> table_oracle(std::shared_ptr<const CsvTable> table);

/// Replaces every "{r}" in `path` with the decimal seed.
std::filesystem::path resolve_replication_path(const std::filesystem::path& path, std::uint64_t seed);

/// Process-data scenario: the first `design_size` rows form the initial
/// design, the test set is either a separate file or the last `test_size`
/// rows, and everything in between is the stream. A "{r}" in the path is
/// replaced by the replication seed.
struct CsvScenarioSpec {
  CsvStreamSpec data;
  std::optional<std::filesystem::path> test_path;
};

class CsvScenario final : public Scenario {
 public:
  /// Reads the file resolved for `probe_seed` once to learn the dimension.
  explicit CsvScenario(CsvScenarioSpec spec, std::uint64_t probe_seed = 0);
  std::size_t dimension() const override { return dimension_; }
  ScenarioInstance instantiate(std::uint64_t seed, std::size_t design_size,
                               std::size_t test_size) const override;

 private:
  CsvScenarioSpec spec_;
  std::size_t dimension_ = 0;
};

/// SplitMix64 finaliser, used to derive independent generator seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace stream_al
