#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "stream_al/errors.hpp"
#include "stream_al/harness.hpp"

namespace stream_al {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct LineContext {
  std::size_t line;
  std::string key;

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("config line " + std::to_string(line) + " (" + key + "): " + why);
  }
};

double as_double(const LineContext& ctx, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) ctx.fail("expected a number, got '" + v + "'");
  return out;
}

std::uint64_t as_count(const LineContext& ctx, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    ctx.fail("expected a nonnegative integer, got '" + v + "'");
  }
  return out;
}

bool as_bool(const LineContext& ctx, const std::string& v) {
  std::string lower = v;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  ctx.fail("expected a boolean, got '" + v + "'");
}

// identity | ar1:<rho> | equicorr:<rho>
std::optional<Matrix> build_input_cov(const std::string& text, std::size_t p) {
  if (text.empty() || text == "identity") return std::nullopt;
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("input_cov: expected identity, ar1:<rho> or equicorr:<rho>");
  const std::string kind = text.substr(0, colon);
  const std::string rho_text = text.substr(colon + 1);
  char* end = nullptr;
  const double rho = std::strtod(rho_text.c_str(), &end);
  if (rho_text.empty() || *end != '\0' || !std::isfinite(rho)) {
    throw ConfigError("input_cov: cannot parse correlation '" + rho_text + "'");
  }
  // ar1 is SPD for |rho| < 1; equicorrelation for -1/(p-1) < rho < 1.
  const double lower = kind == "equicorr" && p > 1 ? -1.0 / static_cast<double>(p - 1) : -1.0;
  if (!(rho > lower && rho < 1.0)) {
    throw ConfigError("input_cov: correlation " + rho_text + " does not give a positive definite matrix");
  }
  Matrix m(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (kind == "ar1") {
        m(i, j) = std::pow(rho, static_cast<double>(i > j ? i - j : j - i));
      } else if (kind == "equicorr") {
        m(i, j) = i == j ? 1.0 : rho;
      } else {
        throw ConfigError("input_cov: unknown structure '" + kind + "'");
      }
    }
  }
  return m;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  return out;
}

}  // namespace

HarnessConfig parse_config(std::string_view text) {
  HarnessConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool standardize_set = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const LineContext ctx{line_no, key};
    auto& e = cfg.engine;
    auto& s = cfg.synthetic;

    if (key == "scenario") {
      if (value == "synthetic") cfg.scenario = ScenarioKind::kSynthetic;
      else if (value == "csv") cfg.scenario = ScenarioKind::kCsv;
      else ctx.fail("expected synthetic or csv");
    } else if (key == "p") {
      s.p = as_count(ctx, value);
    } else if (key == "coef_low") {
      s.coef_low = as_double(ctx, value);
    } else if (key == "coef_high") {
      s.coef_high = as_double(ctx, value);
    } else if (key == "noise_sigma") {
      s.noise_sigma = as_double(ctx, value);
    } else if (key == "input_cov") {
      cfg.input_cov = value;
    } else if (key == "outlier_rate") {
      s.outlier_rate = as_double(ctx, value);
    } else if (key == "outlier_shift") {
      s.outlier_shift = as_double(ctx, value);
    } else if (key == "outlier_response_sigmas") {
      s.outlier_response_sigmas = as_double(ctx, value);
    } else if (key == "outlier_mode") {
      s.outlier_mode = parse_outlier_mode(value);
    } else if (key == "contaminate_initial_design") {
      s.contaminate_initial_design = as_bool(ctx, value);
    } else if (key == "stream_length") {
      s.stream_length = as_count(ctx, value);
    } else if (key == "csv_path") {
      cfg.csv.data.path = value;
    } else if (key == "csv_features") {
      cfg.csv.data.feature_columns = split_list(value);
    } else if (key == "csv_response") {
      cfg.csv.data.response_column = value;
    } else if (key == "csv_has_header") {
      cfg.csv.data.has_header = as_bool(ctx, value);
    } else if (key == "csv_test_path") {
      if (value.empty()) cfg.csv.test_path.reset();
      else cfg.csv.test_path = value;
    } else if (key == "strategies") {
      cfg.strategies.clear();
      for (const auto& item : split_list(value)) {
        const StrategyKind k = parse_strategy_kind(item);
        if (std::find(cfg.strategies.begin(), cfg.strategies.end(), k) == cfg.strategies.end()) {
          cfg.strategies.push_back(k);
        }
      }
    } else if (key == "replications") {
      cfg.replications = as_count(ctx, value);
    } else if (key == "seed") {
      e.seed = as_count(ctx, value);
    } else if (key == "alpha") {
      e.alpha = as_double(ctx, value);
    } else if (key == "budget") {
      e.budget = as_count(ctx, value);
    } else if (key == "warmup") {
      e.warmup_len = as_count(ctx, value);
    } else if (key == "initial_design_size") {
      e.initial_design_size = as_count(ctx, value);
    } else if (key == "ridge_lambda") {
      e.ridge_lambda = as_double(ctx, value);
    } else if (key == "intercept") {
      e.intercept = as_bool(ctx, value);
    } else if (key == "standardize") {
      e.standardize = as_bool(ctx, value);
      standardize_set = true;
    } else if (key == "refresh_threshold") {
      e.refresh_threshold = as_bool(ctx, value);
    } else if (key == "test_size") {
      e.test_size = as_count(ctx, value);
    } else if (key == "record_decisions") {
      e.record_decisions = as_bool(ctx, value);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "workers") {
      cfg.workers = as_count(ctx, value);
    } else if (key == "pct_diff") {
      cfg.pct_diff = as_bool(ctx, value);
    } else if (key == "timing") {
      cfg.timing = as_bool(ctx, value);
    } else if (key == "plot") {
      cfg.plot = as_bool(ctx, value);
    } else {
      ctx.fail("unknown key");
    }
  }

  if (cfg.replications < 1) throw ConfigError("replications must be at least 1");
  if (cfg.strategies.empty()) throw ConfigError("at least one strategy is required");
  if (cfg.pct_diff &&
      std::find(cfg.strategies.begin(), cfg.strategies.end(), StrategyKind::kRandom) == cfg.strategies.end()) {
    throw ConfigError("pct_diff requires the random strategy (or set pct_diff = false)");
  }
  if (cfg.scenario == ScenarioKind::kCsv) {
    // Process data comes in mixed units; synthetic inputs are already standard.
    if (!standardize_set) cfg.engine.standardize = true;
    if (cfg.csv.data.path.empty()) throw ConfigError("csv scenario needs csv_path");
    if (cfg.csv.data.response_column.empty()) throw ConfigError("csv scenario needs csv_response");
  }
  cfg.synthetic.input_cov = build_input_cov(cfg.input_cov, cfg.synthetic.p);
  cfg.engine.measure_time = cfg.timing;
  return cfg;
}

HarnessConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_environment(HarnessConfig& cfg) {
  const char* env = std::getenv("STREAM_AL_SEED");
  if (env == nullptr || *env == '\0') return;
  const std::string v = trim(env);
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("STREAM_AL_SEED must be a nonnegative integer, got '" + v + "'");
  }
  cfg.engine.seed = seed;
}

std::string render_config(const HarnessConfig& cfg) {
  std::ostringstream os;
  const auto b = [](bool v) { return v ? "true" : "false"; };
  const auto& e = cfg.engine;
  const auto& s = cfg.synthetic;
  os << "scenario = " << (cfg.scenario == ScenarioKind::kSynthetic ? "synthetic" : "csv") << "\n";
  if (cfg.scenario == ScenarioKind::kSynthetic) {
    os << "p = " << s.p << "\n"
       << "coef_low = " << format_double(s.coef_low) << "\n"
       << "coef_high = " << format_double(s.coef_high) << "\n"
       << "noise_sigma = " << format_double(s.noise_sigma) << "\n"
       << "input_cov = " << cfg.input_cov << "\n"
       << "outlier_rate = " << format_double(s.outlier_rate) << "\n"
       << "outlier_shift = " << format_double(s.outlier_shift) << "\n"
       << "outlier_response_sigmas = " << format_double(s.outlier_response_sigmas) << "\n"
       << "outlier_mode = " << to_string(s.outlier_mode) << "\n"
       << "contaminate_initial_design = " << b(s.contaminate_initial_design) << "\n"
       << "stream_length = " << s.stream_length << "\n";
  } else {
    os << "csv_path = " << cfg.csv.data.path.string() << "\n"
       << "csv_features = " << join(cfg.csv.data.feature_columns) << "\n"
       << "csv_response = " << cfg.csv.data.response_column << "\n"
       << "csv_has_header = " << b(cfg.csv.data.has_header) << "\n";
    if (cfg.csv.test_path) os << "csv_test_path = " << cfg.csv.test_path->string() << "\n";
  }
  std::vector<std::string> names;
  for (auto k : cfg.strategies) names.emplace_back(to_string(k));
  os << "strategies = " << join(names) << "\n"
     << "replications = " << cfg.replications << "\n"
     << "seed = " << e.seed << "\n"
     << "alpha = " << format_double(e.alpha) << "\n"
     << "budget = " << e.budget << "\n"
     << "warmup = " << e.warmup_len << "\n"
     << "initial_design_size = " << e.initial_design_size << "\n"
     << "ridge_lambda = " << format_double(e.ridge_lambda) << "\n"
     << "intercept = " << b(e.intercept) << "\n"
     << "standardize = " << b(e.standardize) << "\n"
     << "refresh_threshold = " << b(e.refresh_threshold) << "\n"
     << "test_size = " << e.test_size << "\n"
     << "record_decisions = " << b(e.record_decisions) << "\n"
     << "output_dir = " << cfg.output_dir.string() << "\n"
     << "workers = " << cfg.workers << "\n"
     << "pct_diff = " << b(cfg.pct_diff) << "\n"
     << "timing = " << b(cfg.timing) << "\n"
     << "plot = " << b(cfg.plot) << "\n";
  return os.str();
}

std::vector<std::string> profile_names() {
  std::vector<std::string> names;
  for (int p : {10, 20, 50, 100}) {
    names.push_back("sim-p" + std::to_string(p) + "-a10");
    names.push_back("sim-p" + std::to_string(p) + "-a1");
  }
  names.insert(names.end(), {"outliers-0.275", "outliers-1", "outliers-5", "tep", "quick"});
  return names;
}

std::string profile_config(std::string_view profile) {
  HarnessConfig cfg;
  cfg.replications = 50;
  cfg.engine.warmup_len = 500;
  cfg.engine.budget = 50;
  cfg.output_dir = "out/" + std::string(profile);
  const std::string name(profile);

  for (int p : {10, 20, 50, 100}) {
    for (auto [suffix, alpha] : {std::pair{"-a10", 0.1}, std::pair{"-a1", 0.01}}) {
      if (name == "sim-p" + std::to_string(p) + suffix) {
        cfg.synthetic.p = static_cast<std::size_t>(p);
        cfg.engine.alpha = alpha;
        return "# Synthetic study: x ~ N(0, I), beta ~ U(-5, 5), noise N(0, 1).\n" + render_config(cfg);
      }
    }
  }
  for (auto [suffix, rate] : {std::pair{"0.275", 0.00275}, std::pair{"1", 0.01}, std::pair{"5", 0.05}}) {
    if (name == std::string("outliers-") + suffix) {
      cfg.synthetic.p = 20;
      cfg.synthetic.outlier_rate = rate;
      cfg.synthetic.contaminate_initial_design = true;
      return "# Contaminated stream and initial design.\n" + render_config(cfg);
    }
  }
  if (name == "tep") {
    cfg.scenario = ScenarioKind::kCsv;
    cfg.csv.data.path = "data/tep_{r}.csv";
    cfg.csv.data.feature_columns = {"XMEAS1",  "XMEAS2",  "XMEAS3",  "XMEAS4",  "XMEAS5",  "XMEAS6",
                                    "XMEAS9",  "XMEAS10", "XMEAS11", "XMEAS13", "XMEAS14", "XMEAS16",
                                    "XMEAS18", "XMEAS19", "XMEAS21", "XMEAS22"};
    cfg.csv.data.response_column = "Stream 9A";
    cfg.engine.intercept = true;
    cfg.engine.standardize = true;
    cfg.engine.test_size = 500;
    return "# Process data exported to CSV, one file per replication (tep_<seed>.csv).\n" +
           render_config(cfg);
  }
  if (name == "quick") {
    cfg.replications = 5;
    cfg.engine.budget = 20;
    return "# Small smoke-test run.\n" + render_config(cfg);
  }
  throw ConfigError("unknown profile '" + name + "'");
}

}  // namespace stream_al
