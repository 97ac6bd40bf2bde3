#include "stream_al/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "stream_al/errors.hpp"
#include "stream_al/regression.hpp"

namespace stream_al {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("cannot parse '" + s + "' on line " + std::to_string(line), line, 0);
  }
  return v;
}

std::uint64_t parse_count(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("cannot parse '" + s + "' on line " + std::to_string(line), line, 0);
  }
  return v;
}

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::vector<std::vector<std::string>> read_table(std::istream& is, const std::string& expected_header) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("empty file, expected header", 1, 0);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) throw SchemaError("unexpected header '" + line + "'");
  const std::size_t width = split_csv_line(expected_header).size();
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != width) {
      throw ParseError("line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                           " fields, expected " + std::to_string(width),
                       line_no, fields.size());
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

const std::string kCurvesHeader =
    "strategy,step,labels_used,mean_rmse,std_rmse,mean_pct_diff_vs_random,mean_decision_ms";
const std::string kRecordsHeader =
    "strategy,replication,seed,step,labels_used,rmse,scanned,mean_decision_ms,incomplete";
const std::string kDecisionsHeader = "strategy,replication,arrival_index,score,threshold,selected";

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::unique_ptr<Scenario> make_scenario(const HarnessConfig& cfg) {
  if (cfg.scenario == ScenarioKind::kCsv) {
    return std::make_unique<CsvScenario>(cfg.csv, cfg.engine.seed);
  }
  return std::make_unique<SyntheticScenario>(cfg.synthetic);
}

std::string summary_text(const HarnessConfig& cfg, const HarnessResult& result) {
  std::ostringstream os;
  os << "replications: " << cfg.replications << "\n";
  os << "base seed: " << cfg.engine.seed << "\n";
  os << "alpha: " << format_double(cfg.engine.alpha) << ", budget: " << cfg.engine.budget
     << ", warm-up: " << cfg.engine.warmup_len << "\n\n";
  const auto groups = group_by_strategy(result.records);
  const std::size_t last = result.curves.steps() == 0 ? 0 : result.curves.steps() - 1;
  os << std::fixed << std::setprecision(6);
  for (const auto& [kind, recs] : groups) {
    double scanned = 0.0;
    double decision_ms = 0.0;
    std::size_t incomplete = 0;
    std::size_t fallback = 0;
    std::size_t floored = 0;
    for (const auto& r : recs) {
      scanned += static_cast<double>(r.scanned);
      decision_ms += r.mean_decision_ms;
      incomplete += r.incomplete ? 1 : 0;
      fallback += r.ridge_fallback ? 1 : 0;
      floored += r.whitening_floored ? 1 : 0;
    }
    const double n = static_cast<double>(recs.size());
    os << "[" << to_string(kind) << "]\n";
    if (const CurvePoint* first = result.curves.find(kind, 0)) {
      os << "  step 0 mean RMSE: " << first->mean_rmse << "\n";
    }
    if (const CurvePoint* fin = result.curves.find(kind, last)) {
      os << "  step " << last << " mean RMSE: " << fin->mean_rmse << " (std " << fin->std_rmse << ")\n";
      if (!std::isnan(fin->mean_pct_diff_vs_random)) {
        double avg = 0.0;
        for (std::size_t s = 1; s <= last; ++s) avg += result.curves.find(kind, s)->mean_pct_diff_vs_random;
        if (last > 0) os << "  mean %diff vs random over steps 1.." << last << ": " << avg / static_cast<double>(last) << "\n";
      }
    }
    os << "  mean points scanned: " << scanned / n << "\n";
    if (cfg.timing) os << "  mean decision time (ms): " << decision_ms / n << "\n";
    os << "  incomplete runs: " << incomplete << "\n";
    os << "  ridge fallbacks: " << fallback << "\n";
    os << "  floored whitening eigenvalues: " << floored << "\n";
  }
  return os.str();
}

}  // namespace

const CurvePoint* AggregatedCurves::find(StrategyKind kind, std::size_t step) const {
  for (const auto& r : rows) {
    if (r.strategy == kind && r.step == step) return &r;
  }
  return nullptr;
}

std::size_t AggregatedCurves::steps() const {
  std::size_t n = 0;
  for (const auto& r : rows) n = std::max(n, r.step + 1);
  return n;
}

bool operator==(const AggregatedCurves& a, const AggregatedCurves& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.strategy != y.strategy || x.step != y.step || x.labels_used != y.labels_used ||
        !same_double(x.mean_rmse, y.mean_rmse) || !same_double(x.std_rmse, y.std_rmse) ||
        !same_double(x.mean_pct_diff_vs_random, y.mean_pct_diff_vs_random) ||
        !same_double(x.mean_decision_ms, y.mean_decision_ms)) {
      return false;
    }
  }
  return true;
}

std::map<StrategyKind, std::vector<ExperimentRecord>> group_by_strategy(
    const std::vector<ExperimentRecord>& records) {
  std::map<StrategyKind, std::vector<ExperimentRecord>> out;
  for (const auto& r : records) out[r.strategy].push_back(r);
  return out;
}

AggregatedCurves aggregate(const std::map<StrategyKind, std::vector<ExperimentRecord>>& records,
                           bool pct_diff) {
  AggregatedCurves curves;
  std::size_t steps = std::numeric_limits<std::size_t>::max();
  bool any = false;
  for (const auto& [kind, recs] : records) {
    for (const auto& r : recs) {
      steps = std::min(steps, r.steps.size());
      any = true;
    }
  }
  if (!any) return curves;

  // Sorting by replication makes the floating-point sums independent of the
  // order in which replications finished.
  std::map<StrategyKind, std::vector<const ExperimentRecord*>> sorted;
  for (const auto& [kind, recs] : records) {
    auto& v = sorted[kind];
    for (const auto& r : recs) v.push_back(&r);
    std::sort(v.begin(), v.end(), [](const ExperimentRecord* a, const ExperimentRecord* b) {
      return a->replication < b->replication;
    });
  }

  std::map<std::size_t, const ExperimentRecord*> random_by_rep;
  if (pct_diff) {
    const auto it = sorted.find(StrategyKind::kRandom);
    if (it == sorted.end() || it->second.empty()) {
      throw ConfigError("aggregate: percentage RMSE difference needs a random arm");
    }
    for (const auto* r : it->second) random_by_rep[r->replication] = r;
  }

  for (const auto& [kind, recs] : sorted) {
    if (recs.empty()) continue;
    const double n = static_cast<double>(recs.size());
    for (std::size_t s = 0; s < steps; ++s) {
      CurvePoint pt;
      pt.strategy = kind;
      pt.step = s;
      pt.labels_used = recs.front()->steps[s].labels_used;
      double sum = 0.0;
      double ms = 0.0;
      for (const auto* r : recs) {
        sum += r->steps[s].rmse;
        ms += r->steps[s].mean_decision_ms;
      }
      pt.mean_rmse = sum / n;
      pt.mean_decision_ms = ms / n;
      double ss = 0.0;
      for (const auto* r : recs) ss += (r->steps[s].rmse - pt.mean_rmse) * (r->steps[s].rmse - pt.mean_rmse);
      pt.std_rmse = recs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
      if (pct_diff) {
        double pct = 0.0;
        for (const auto* r : recs) {
          const auto match = random_by_rep.find(r->replication);
          if (match == random_by_rep.end()) {
            throw ConfigError("aggregate: no random record for replication " + std::to_string(r->replication));
          }
          pct += percent_rmse_diff(r->steps[s].rmse, match->second->steps[s].rmse);
        }
        pt.mean_pct_diff_vs_random = pct / n;
      } else {
        pt.mean_pct_diff_vs_random = kNaN;
      }
      curves.rows.push_back(pt);
    }
  }
  return curves;
}

void write_curves_csv(std::ostream& os, const AggregatedCurves& curves) {
  os << kCurvesHeader << "\n";
  for (const auto& r : curves.rows) {
    os << to_string(r.strategy) << "," << r.step << "," << r.labels_used << "," << format_double(r.mean_rmse)
       << "," << format_double(r.std_rmse) << "," << format_double(r.mean_pct_diff_vs_random) << ","
       << format_double(r.mean_decision_ms) << "\n";
  }
}

AggregatedCurves read_curves_csv(std::istream& is) {
  AggregatedCurves curves;
  std::size_t line = 1;
  for (const auto& f : read_table(is, kCurvesHeader)) {
    ++line;
    CurvePoint pt;
    pt.strategy = parse_strategy_kind(f[0]);
    pt.step = parse_count(f[1], line);
    pt.labels_used = parse_count(f[2], line);
    pt.mean_rmse = parse_double(f[3], line);
    pt.std_rmse = parse_double(f[4], line);
    pt.mean_pct_diff_vs_random = parse_double(f[5], line);
    pt.mean_decision_ms = parse_double(f[6], line);
    curves.rows.push_back(pt);
  }
  return curves;
}

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  os << kRecordsHeader << "\n";
  for (const auto& r : records) {
    for (const auto& s : r.steps) {
      os << to_string(r.strategy) << "," << r.replication << "," << r.seed << "," << s.step << ","
         << s.labels_used << "," << format_double(s.rmse) << "," << s.scanned << ","
         << format_double(s.mean_decision_ms) << "," << (r.incomplete ? 1 : 0) << "\n";
    }
  }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& is) {
  std::vector<ExperimentRecord> out;
  std::map<std::pair<StrategyKind, std::size_t>, std::size_t> index;
  std::size_t line = 1;
  for (const auto& f : read_table(is, kRecordsHeader)) {
    ++line;
    const StrategyKind kind = parse_strategy_kind(f[0]);
    const std::size_t rep = parse_count(f[1], line);
    auto [it, inserted] = index.try_emplace({kind, rep}, out.size());
    if (inserted) {
      ExperimentRecord r;
      r.strategy = kind;
      r.replication = rep;
      r.seed = parse_count(f[2], line);
      r.incomplete = f[8] == "1";
      out.push_back(std::move(r));
    }
    ExperimentRecord& r = out[it->second];
    StepRow s;
    s.step = parse_count(f[3], line);
    s.labels_used = parse_count(f[4], line);
    s.rmse = parse_double(f[5], line);
    s.scanned = parse_count(f[6], line);
    s.mean_decision_ms = parse_double(f[7], line);
    r.steps.push_back(s);
    r.scanned = std::max(r.scanned, s.scanned);
    r.selected_count = s.labels_used;
  }
  return out;
}

void write_decisions_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  os << kDecisionsHeader << "\n";
  for (const auto& r : records) {
    for (const auto& d : r.decisions) {
      os << to_string(r.strategy) << "," << r.replication << "," << d.arrival_index << ","
         << format_double(d.score) << "," << format_double(d.threshold) << "," << (d.selected ? 1 : 0) << "\n";
    }
  }
}

std::string render_svg(const AggregatedCurves& curves) {
  constexpr double kWidth = 800.0;
  constexpr double kHeight = 480.0;
  constexpr double kLeft = 70.0;
  constexpr double kRight = 140.0;
  constexpr double kTop = 30.0;
  constexpr double kBottom = 50.0;

  bool use_pct = false;
  for (const auto& r : curves.rows) {
    if (r.strategy != StrategyKind::kRandom && !std::isnan(r.mean_pct_diff_vs_random)) use_pct = true;
  }
  const auto value = [&](const CurvePoint& r) { return use_pct ? r.mean_pct_diff_vs_random : r.mean_rmse; };

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t max_step = 1;
  for (const auto& r : curves.rows) {
    const double v = value(r);
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    max_step = std::max(max_step, r.step);
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto px = [&](double step) { return kLeft + plot_w * step / static_cast<double>(max_step); };
  const auto py = [&](double v) { return kTop + plot_h * (hi - v) / (hi - lo); };

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
     << kTop + plot_h << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
     << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(v) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << v
       << "</text>\n";
  }
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
     << "\" font-size=\"13\" text-anchor=\"middle\">learning step</text>\n";
  os << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" font-size=\"13\" transform=\"rotate(-90 16 "
     << kTop + plot_h / 2 << ")\" text-anchor=\"middle\">"
     << (use_pct ? "% RMSE difference vs random" : "mean RMSE") << "</text>\n";

  const char* colours[] = {"#d62728", "#1f77b4", "#7f7f7f"};
  int legend = 0;
  for (StrategyKind kind : {StrategyKind::kCdo, StrategyKind::kNormThreshold, StrategyKind::kRandom}) {
    std::ostringstream pts;
    pts << std::fixed << std::setprecision(2);
    bool has = false;
    for (const auto& r : curves.rows) {
      if (r.strategy != kind || !std::isfinite(value(r))) continue;
      pts << px(static_cast<double>(r.step)) << "," << py(value(r)) << " ";
      has = true;
    }
    if (!has) continue;
    const char* colour = colours[static_cast<int>(kind)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"" << pts.str()
       << "\"/>\n";
    const double ly = kTop + 20.0 * legend++;
    os << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 40
       << "\" y2=\"" << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kWidth - kRight + 46 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << to_string(kind)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

HarnessResult run_replications(const HarnessConfig& cfg) {
  if (cfg.replications < 1) throw ConfigError("replications must be at least 1");
  if (cfg.strategies.empty()) throw ConfigError("at least one strategy is required");
  const std::unique_ptr<Scenario> scenario = make_scenario(cfg);
  validate(cfg.engine, scenario->dimension());

  struct Task {
    std::size_t replication;
    StrategyKind kind;
  };
  std::vector<Task> tasks;
  for (std::size_t r = 0; r < cfg.replications; ++r)
    for (StrategyKind k : cfg.strategies) tasks.push_back({r, k});

  std::vector<ExperimentRecord> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  const auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      {
        std::lock_guard lock(failure_mu);
        if (failure) return;
      }
      try {
        EngineConfig ec = cfg.engine;
        ec.seed = cfg.engine.seed + tasks[i].replication;
        ec.measure_time = cfg.timing;
        results[i] = run_experiment(*scenario, ec, tasks[i].kind, tasks[i].replication);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  std::size_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, tasks.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  HarnessResult out;
  out.records = std::move(results);
  out.curves = aggregate(group_by_strategy(out.records), cfg.pct_diff);
  return out;
}

HarnessResult run_harness(const HarnessConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.output_dir)) {
    throw IoError("cannot create output directory " + cfg.output_dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
  }
  // Probe writability before spending time on the runs.
  write_file(cfg.output_dir / "summary.txt", "running\n");

  HarnessResult result = run_replications(cfg);

  std::ostringstream curves;
  write_curves_csv(curves, result.curves);
  write_file(cfg.output_dir / "curves.csv", curves.str());

  std::ostringstream records;
  write_records_csv(records, result.records);
  write_file(cfg.output_dir / "records.csv", records.str());

  std::ostringstream decisions;
  write_decisions_csv(decisions, result.records);
  write_file(cfg.output_dir / "decisions.csv", decisions.str());

  write_file(cfg.output_dir / "summary.txt", render_config(cfg) + "\n" + summary_text(cfg, result));
  if (cfg.plot) write_file(cfg.output_dir / "curves.svg", render_svg(result.curves));
  return result;
}

AggregatedCurves aggregate_directory(const std::filesystem::path& dir, bool pct_diff) {
  std::ifstream in(dir / "records.csv");
  if (!in) throw IoError("cannot read " + (dir / "records.csv").string());
  const auto records = read_records_csv(in);
  AggregatedCurves curves = aggregate(group_by_strategy(records), pct_diff);
  std::ostringstream os;
  write_curves_csv(os, curves);
  write_file(dir / "curves.csv", os.str());
  return curves;
}

}  // namespace stream_al
