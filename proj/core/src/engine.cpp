#include "stream_al/engine.hpp"

#include <chrono>
#include <string>

#include "stream_al/datagen.hpp"
#include "stream_al/errors.hpp"
#include "stream_al/regression.hpp"

namespace stream_al {

void validate(const EngineConfig& cfg, std::size_t p) {
  if (cfg.warmup_len < p + 1) {
    throw ConfigError("warm-up length " + std::to_string(cfg.warmup_len) + " is below p + 1 = " +
                      std::to_string(p + 1));
  }
  if (cfg.design_size_for(p) < p && cfg.ridge_lambda == 0.0) {
    throw ConfigError("initial design size " + std::to_string(cfg.design_size_for(p)) +
                      " is below p = " + std::to_string(p));
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) {
    throw ConfigError("alpha must lie in (0, 1], got " + std::to_string(cfg.alpha));
  }
  if (!(cfg.ridge_lambda >= 0.0)) throw ConfigError("ridge_lambda must be nonnegative");
  if (cfg.test_size == 0) throw ConfigError("test_size must be positive");
}

std::uint64_t random_arm_seed(std::uint64_t seed) { return mix_seed(seed, 0x52414e44ULL); }

WarmupResult run_warmup(StreamSource& src, const EngineConfig& cfg, std::span<const Vector> initial_design) {
  const std::size_t p = src.dimension();
  if (cfg.warmup_len < p + 1) {
    throw ConfigError("warm-up length " + std::to_string(cfg.warmup_len) + " is below p + 1 = " +
                      std::to_string(p + 1));
  }
  std::vector<Vector> raw;
  raw.reserve(cfg.warmup_len);
  while (raw.size() < cfg.warmup_len) {
    auto pt = src.next();
    if (!pt) {
      throw InsufficientStreamError("stream ended after " + std::to_string(raw.size()) +
                                    " of " + std::to_string(cfg.warmup_len) + " warm-up points");
    }
    raw.push_back(std::move(pt->x));
  }
  WarmupResult out;
  out.transform = fit_whitener(raw, cfg.standardize);
  out.warmup = whiten_all(out.transform, raw);
  out.design = whiten_all(out.transform, initial_design);
  return out;
}

LabeledDesign build_initial_design(std::vector<Vector> points, Vector labels, double ridge_lambda,
                                   bool& fallback) {
  fallback = false;
  try {
    return LabeledDesign::create(points, labels, ridge_lambda);
  } catch (const SingularityError&) {
    if (ridge_lambda != 0.0 || points.empty()) throw;
    const std::size_t p = points.front().size();
    double trace = 0.0;
    for (const auto& x : points) trace += dot(x, x);
    const double lambda = 1e-6 * trace / static_cast<double>(p);
    if (!(lambda > 0.0)) throw;
    fallback = true;
    return LabeledDesign::create(std::move(points), std::move(labels), lambda);
  }
}

namespace {

double test_rmse(const LabeledDesign& design, const TestSet& test, bool intercept) {
  const LinearModel model = fit(design, intercept);
  Vector predictions;
  predictions.reserve(test.points.size());
  for (const auto& x : test.points) predictions.push_back(predict(model, x));
  return rmse(predictions, test.labels);
}

}  // namespace

ExperimentRecord run_selection(StreamSource& src, const LabelOracle& oracle, QueryStrategy& strategy,
                               LabeledDesign& design, const WhiteningTransform& transform,
                               const TestSet& test, const EngineConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  ExperimentRecord rec;
  rec.strategy = strategy.kind();
  rec.seed = cfg.seed;
  rec.steps.push_back({0, 0, test_rmse(design, test, cfg.intercept), 0, 0.0});

  double total_ms = 0.0;
  double interval_ms = 0.0;
  std::uint64_t interval_count = 0;
  std::size_t labels = 0;

  while (labels < cfg.budget) {
    auto pt = src.next();
    if (!pt) {
      rec.incomplete = true;
      rec.incomplete_reason = "stream exhausted after " + std::to_string(labels) + " of " +
                              std::to_string(cfg.budget) + " labels";
      break;
    }
    const Vector z = whiten(transform, pt->x);

    Decision decision;
    if (cfg.measure_time) {
      const auto t0 = Clock::now();
      decision = strategy.decide(design, z);
      const auto t1 = Clock::now();
      const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      total_ms += ms;
      interval_ms += ms;
    } else {
      decision = strategy.decide(design, z);
    }
    ++rec.scanned;
    ++interval_count;
    if (cfg.record_decisions) {
      rec.decisions.push_back({pt->index, decision.score, decision.threshold_used, decision.selected});
    }
    if (!decision.selected) continue;

    double y = 0.0;
    try {
      y = oracle.label(pt->index);
    } catch (const std::exception& e) {
      rec.incomplete = true;
      rec.incomplete_reason = std::string("oracle failure: ") + e.what();
      break;
    }
    design.augment(z, y);
    ++labels;
    ++rec.selected_count;
    if (cfg.refresh_threshold) strategy.refresh_threshold(design);
    rec.steps.push_back({labels, labels, test_rmse(design, test, cfg.intercept), rec.scanned,
                         interval_count ? interval_ms / static_cast<double>(interval_count) : 0.0});
    interval_ms = 0.0;
    interval_count = 0;
  }
  rec.mean_decision_ms = rec.scanned ? total_ms / static_cast<double>(rec.scanned) : 0.0;
  return rec;
}

ExperimentRecord run_experiment(const Scenario& scenario, const EngineConfig& cfg, StrategyKind kind,
                                std::size_t replication) {
  const std::size_t p = scenario.dimension();
  validate(cfg, p);
  ScenarioInstance inst = scenario.instantiate(cfg.seed, cfg.design_size_for(p), cfg.test_size);

  WarmupResult warm = run_warmup(*inst.stream, cfg, inst.design_points);
  bool fallback = false;
  LabeledDesign design =
      build_initial_design(std::move(warm.design), std::move(inst.design_labels), cfg.ridge_lambda, fallback);
  TestSet test{whiten_all(warm.transform, inst.test.points), std::move(inst.test.labels)};

  QueryStrategy strategy = QueryStrategy::make(kind, cfg.alpha, random_arm_seed(cfg.seed));
  strategy.refresh_threshold(design, std::move(warm.warmup));

  ExperimentRecord rec = run_selection(*inst.stream, *inst.oracle, strategy, design, warm.transform, test, cfg);
  rec.replication = replication;
  rec.ridge_fallback = fallback;
  rec.whitening_floored = warm.transform.floored;
  return rec;
}

}  // namespace stream_al
