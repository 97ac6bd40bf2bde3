#include "stream_al/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>

#include "stream_al/errors.hpp"

namespace stream_al {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string_view to_string(OutlierMode mode) {
  switch (mode) {
    case OutlierMode::kBoth:
      return "both";
    case OutlierMode::kInputs:
      return "x";
    case OutlierMode::kResponse:
      return "y";
  }
  return "both";
}

OutlierMode parse_outlier_mode(std::string_view text) {
  if (text == "both") return OutlierMode::kBoth;
  if (text == "x" || text == "inputs") return OutlierMode::kInputs;
  if (text == "y" || text == "response") return OutlierMode::kResponse;
  throw ConfigError("unknown outlier mode '" + std::string(text) + "'");
}

namespace {

// Channel tags keep the clean draw, the contamination mask and the
// coefficient draw on independent generators.
constexpr std::uint64_t kChannelBeta = 0xbe7a;
constexpr std::uint64_t kChannelClean = 0xc1ea;
constexpr std::uint64_t kChannelMask = 0x3a5c;

std::mt19937_64 sample_rng(std::uint64_t seed, Segment segment, std::uint64_t index,
                           std::uint64_t channel) {
  return std::mt19937_64(
      mix_seed(mix_seed(mix_seed(seed, channel), static_cast<std::uint64_t>(segment)), index));
}

class SyntheticStreamSource final : public StreamSource {
 public:
  SyntheticStreamSource(std::shared_ptr<const SyntheticGenerator> gen, std::uint64_t length)
      : gen_(std::move(gen)), length_(length) {}

  std::optional<StreamPoint> next() override {
    if (next_ >= length_) return std::nullopt;
    const std::uint64_t i = next_++;
    return StreamPoint{i, gen_->sample(Segment::kStream, i).x};
  }
  std::size_t dimension() const override { return gen_->spec().p; }

 private:
  std::shared_ptr<const SyntheticGenerator> gen_;
  std::uint64_t length_;
  std::uint64_t next_ = 0;
};

class SyntheticOracle final : public LabelOracle {
 public:
  explicit SyntheticOracle(std::shared_ptr<const SyntheticGenerator> gen) : gen_(std::move(gen)) {}
  double label(std::uint64_t index) const override {
    if (index >= gen_->spec().stream_length) {
      throw OracleError("synthetic oracle: index " + std::to_string(index) + " beyond the stream");
    }
    return gen_->sample(Segment::kStream, index).y;
  }

 private:
  std::shared_ptr<const SyntheticGenerator> gen_;
};

}  // namespace

SyntheticGenerator::SyntheticGenerator(SyntheticSpec spec) : spec_(std::move(spec)) {
  if (spec_.p == 0) throw ConfigError("synthetic spec: p must be positive");
  if (!(spec_.coef_low < spec_.coef_high)) throw ConfigError("synthetic spec: coef_low must be below coef_high");
  if (!(spec_.noise_sigma >= 0.0)) throw ConfigError("synthetic spec: noise_sigma must be nonnegative");
  if (!(spec_.outlier_rate >= 0.0 && spec_.outlier_rate <= 1.0)) {
    throw ConfigError("synthetic spec: outlier_rate must lie in [0, 1]");
  }
  if (spec_.input_cov) {
    if (spec_.input_cov->rows() != spec_.p || !spec_.input_cov->square()) {
      throw ConfigError("synthetic spec: input_cov must be p x p");
    }
    invert_spd(*spec_.input_cov);  // rejects non-SPD and ill-conditioned matrices
    chol_ = cholesky(*spec_.input_cov);
  } else {
    chol_ = Matrix::identity(spec_.p);
  }
  std::mt19937_64 rng(mix_seed(spec_.seed, kChannelBeta));
  std::uniform_real_distribution<double> coef(spec_.coef_low, spec_.coef_high);
  beta_.resize(spec_.p);
  for (double& b : beta_) b = coef(rng);
}

SyntheticSample SyntheticGenerator::clean_sample(Segment segment, std::uint64_t index) const {
  auto rng = sample_rng(spec_.seed, segment, index, kChannelClean);
  std::normal_distribution<double> normal;
  Vector g(spec_.p);
  for (double& v : g) v = normal(rng);
  SyntheticSample s;
  s.x.assign(spec_.p, 0.0);
  for (std::size_t i = 0; i < spec_.p; ++i)
    for (std::size_t k = 0; k <= i; ++k) s.x[i] += chol_(i, k) * g[k];
  s.y = dot(beta_, s.x) + spec_.noise_sigma * normal(rng);
  return s;
}

bool SyntheticGenerator::is_outlier(Segment segment, std::uint64_t index) const {
  if (spec_.outlier_rate <= 0.0) return false;
  if (segment == Segment::kTest) return false;
  if (segment == Segment::kDesign && !spec_.contaminate_initial_design) return false;
  auto rng = sample_rng(spec_.seed, segment, index, kChannelMask);
  return std::generate_canonical<double, 53>(rng) < spec_.outlier_rate;
}

SyntheticSample SyntheticGenerator::sample(Segment segment, std::uint64_t index) const {
  SyntheticSample s = clean_sample(segment, index);
  if (!is_outlier(segment, index)) return s;
  s.outlier = true;
  // Direction and sign come from the mask generator, after the Bernoulli draw.
  auto rng = sample_rng(spec_.seed, segment, index, kChannelMask);
  (void)std::generate_canonical<double, 53>(rng);
  std::normal_distribution<double> normal;
  Vector u(spec_.p);
  for (double& v : u) v = normal(rng);
  const double len = norm2(u);
  const double sign = std::generate_canonical<double, 53>(rng) < 0.5 ? -1.0 : 1.0;
  if (spec_.outlier_mode != OutlierMode::kResponse && len > 0.0) {
    for (std::size_t i = 0; i < spec_.p; ++i) s.x[i] += spec_.outlier_shift * u[i] / len;
  }
  if (spec_.outlier_mode != OutlierMode::kInputs) {
    s.y += sign * spec_.outlier_response_sigmas * spec_.noise_sigma;
  }
  return s;
}

SyntheticStream gen_synthetic(const SyntheticSpec& spec) {
  auto gen = std::make_shared<const SyntheticGenerator>(spec);
  SyntheticStream out;
  out.beta = gen->beta();
  out.stream = std::make_unique<SyntheticStreamSource>(gen, spec.stream_length);
  out.oracle = std::make_shared<SyntheticOracle>(gen);
  return out;
}

SyntheticScenario::SyntheticScenario(SyntheticSpec spec) : spec_(std::move(spec)) {
  SyntheticGenerator validate(spec_);
}

ScenarioInstance SyntheticScenario::instantiate(std::uint64_t seed, std::size_t design_size,
                                                std::size_t test_size) const {
  SyntheticSpec spec = spec_;
  spec.seed = seed;
  auto gen = std::make_shared<const SyntheticGenerator>(spec);
  ScenarioInstance inst;
  for (std::size_t i = 0; i < design_size; ++i) {
    SyntheticSample s = gen->sample(Segment::kDesign, i);
    inst.design_points.push_back(std::move(s.x));
    inst.design_labels.push_back(s.y);
  }
  for (std::size_t i = 0; i < test_size; ++i) {
    SyntheticSample s = gen->sample(Segment::kTest, i);
    inst.test.points.push_back(std::move(s.x));
    inst.test.labels.push_back(s.y);
  }
  inst.stream = std::make_unique<SyntheticStreamSource>(gen, spec.stream_length);
  inst.oracle = std::make_shared<SyntheticOracle>(gen);
  return inst;
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Splits one CSV record. Double quotes group a field and "" escapes a quote.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

double parse_cell(const std::string& cell, std::size_t line, std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError("csv: cannot parse '" + cell + "' as a finite number at line " +
                         std::to_string(line) + ", column " + std::to_string(col),
                     line, col);
  }
  return v;
}

class TableStream final : public StreamSource {
 public:
  TableStream(std::shared_ptr<const CsvTable> table, std::size_t begin, std::size_t end)
      : table_(std::move(table)), next_(begin), end_(std::min(end, table_->features.size())) {}
  std::optional<StreamPoint> next() override {
    if (next_ >= end_) return std::nullopt;
    const std::size_t i = next_++;
    return StreamPoint{i, table_->features[i]};
  }
  std::size_t dimension() const override { return table_->feature_names.size(); }

 private:
  std::shared_ptr<const CsvTable> table_;
  std::size_t next_;
  std::size_t end_;
};

class TableOracle final : public LabelOracle {
 public:
  explicit TableOracle(std::shared_ptr<const CsvTable> table) : table_(std::move(table)) {}
  double label(std::uint64_t index) const override {
    if (index >= table_->responses.size()) {
      throw OracleError("csv oracle: row " + std::to_string(index) + " does not exist");
    }
    return table_->responses[index];
  }

 private:
  std::shared_ptr<const CsvTable> table_;
};

}  // namespace

CsvTable read_csv_table(const CsvStreamSpec& spec) {
  std::ifstream in(spec.path);
  if (!in) throw IoError("csv: cannot open " + spec.path.string());

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::size_t width = 0;
  bool have_width = false;

  auto next_record = [&](std::vector<std::string>& out) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (trim(line).empty()) continue;
      out = split_record(line);
      return true;
    }
    return false;
  };

  std::vector<std::string> record;
  if (spec.has_header) {
    if (!next_record(header)) throw SchemaError("csv: " + spec.path.string() + " has no header row");
    width = header.size();
    have_width = true;
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;
  while (next_record(record)) {
    if (!have_width) {
      width = record.size();
      have_width = true;
      for (std::size_t c = 0; c < width; ++c) header.push_back(std::to_string(c));
    }
    if (record.size() != width) {
      throw ParseError("csv: line " + std::to_string(line_no) + " has " + std::to_string(record.size()) +
                           " fields, expected " + std::to_string(width),
                       line_no, record.size());
    }
    rows.push_back(std::move(record));
    row_lines.push_back(line_no);
  }

  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) column_of.emplace(header[c], c);
  auto resolve = [&](const std::string& name) {
    const auto it = column_of.find(name);
    if (it == column_of.end()) throw SchemaError("csv: column '" + name + "' not found in " + spec.path.string());
    return it->second;
  };

  if (spec.response_column.empty()) throw SchemaError("csv: no response column given");
  // Without a header there is nothing to resolve against until a row is seen.
  if (!have_width) return CsvTable{spec.feature_columns, {}, {}};

  const std::size_t response = resolve(spec.response_column);
  std::vector<std::size_t> features;
  std::vector<std::string> names;
  if (spec.feature_columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != response) {
        features.push_back(c);
        names.push_back(header[c]);
      }
    }
  } else {
    for (const auto& name : spec.feature_columns) {
      if (name == spec.response_column) {
        throw SchemaError("csv: column '" + name + "' is both a feature and the response");
      }
      features.push_back(resolve(name));
      names.push_back(name);
    }
  }
  if (features.empty()) throw SchemaError("csv: no feature columns");

  CsvTable table;
  table.feature_names = std::move(names);
  table.features.reserve(rows.size());
  table.responses.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Vector x(features.size());
    for (std::size_t j = 0; j < features.size(); ++j) {
      x[j] = parse_cell(rows[r][features[j]], row_lines[r], features[j] + 1);
    }
    table.features.push_back(std::move(x));
    table.responses.push_back(parse_cell(rows[r][response], row_lines[r], response + 1));
  }
  return table;
}

std::unique_ptr<StreamSource> table_stream(std::shared_ptr<const CsvTable> table, std::size_t begin,
                                           std::size_t end) {
  return std::make_unique<TableStream>(std::move(table), begin, end);
}

std::shared_ptr<const LabelOracle> table_oracle(std::shared_ptr<const CsvTable> table) {
  return std::make_shared<TableOracle>(std::move(table));
}

CsvStream csv_stream(const CsvStreamSpec& spec) {
  auto table = std::make_shared<const CsvTable>(read_csv_table(spec));
  CsvStream out;
  out.dimension = table->feature_names.size();
  out.stream = table_stream(table, 0, table->features.size());
  out.oracle = table_oracle(table);
  return out;
}

std::filesystem::path resolve_replication_path(const std::filesystem::path& path, std::uint64_t seed) {
  std::string s = path.string();
  const std::string token = "{r}";
  const std::string value = std::to_string(seed);
  for (std::size_t pos = s.find(token); pos != std::string::npos; pos = s.find(token, pos + value.size())) {
    s.replace(pos, token.size(), value);
  }
  return s;
}

CsvScenario::CsvScenario(CsvScenarioSpec spec, std::uint64_t probe_seed) : spec_(std::move(spec)) {
  CsvStreamSpec probe = spec_.data;
  probe.path = resolve_replication_path(probe.path, probe_seed);
  dimension_ = read_csv_table(probe).feature_names.size();
}

ScenarioInstance CsvScenario::instantiate(std::uint64_t seed, std::size_t design_size,
                                          std::size_t test_size) const {
  CsvStreamSpec data = spec_.data;
  data.path = resolve_replication_path(data.path, seed);
  auto table = std::make_shared<const CsvTable>(read_csv_table(data));
  if (table->feature_names.size() != dimension_) {
    throw SchemaError("csv: " + data.path.string() + " has a different feature count than the probe file");
  }

  ScenarioInstance inst;
  std::size_t stream_end = table->features.size();
  if (spec_.test_path) {
    CsvStreamSpec test = spec_.data;
    test.path = resolve_replication_path(*spec_.test_path, seed);
    CsvTable t = read_csv_table(test);
    inst.test.points = std::move(t.features);
    inst.test.labels = std::move(t.responses);
  } else {
    if (table->features.size() < design_size + test_size) {
      throw InsufficientStreamError("csv: " + data.path.string() + " has too few rows for the design and test set");
    }
    stream_end -= test_size;
    for (std::size_t i = stream_end; i < table->features.size(); ++i) {
      inst.test.points.push_back(table->features[i]);
      inst.test.labels.push_back(table->responses[i]);
    }
  }
  if (stream_end < design_size) {
    throw InsufficientStreamError("csv: " + data.path.string() + " has fewer rows than the initial design");
  }
  for (std::size_t i = 0; i < design_size; ++i) {
    inst.design_points.push_back(table->features[i]);
    inst.design_labels.push_back(table->responses[i]);
  }
  inst.stream = table_stream(table, design_size, stream_end);
  inst.oracle = table_oracle(table);
  return inst;
}

}  // namespace stream_al
