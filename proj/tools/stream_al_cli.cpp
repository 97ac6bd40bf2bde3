// Command-line front end: run experiments, re-aggregate outputs, emit
// reference configs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stream_al/errors.hpp"
#include "stream_al/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int cmd_run(const std::string& config_path, const std::optional<std::string>& output_dir,
            const std::optional<std::size_t>& workers, bool quiet) {
  stream_al::HarnessConfig cfg = stream_al::load_config(config_path);
  stream_al::apply_environment(cfg);
  if (output_dir) cfg.output_dir = *output_dir;
  if (workers) cfg.workers = *workers;
  const auto result = stream_al::run_harness(cfg);
  std::size_t floored = 0;
  for (const auto& r : result.records) floored += r.whitening_floored ? 1 : 0;
  if (floored > 0) {
    std::cerr << "warning: " << floored
              << " run(s) had near-singular warm-up covariance; eigenvalues were floored before whitening\n";
  }
  if (!quiet) {
    std::cout << "wrote " << (cfg.output_dir / "curves.csv").string() << " (" << result.records.size()
              << " runs, " << result.curves.steps() << " steps)\n";
  }
  return kExitOk;
}

int cmd_aggregate(const std::string& dir, bool no_pct_diff) {
  const auto curves = stream_al::aggregate_directory(dir, !no_pct_diff);
  std::cout << "wrote " << (std::filesystem::path(dir) / "curves.csv").string() << " ("
            << curves.rows.size() << " rows)\n";
  return kExitOk;
}

int cmd_gen_config(const std::string& profile, const std::optional<std::string>& out) {
  const std::string text = stream_al::profile_config(profile);
  if (!out) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream f(*out);
  if (!f) throw stream_al::IoError("cannot write " + *out);
  f << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stream-based active learning simulator for linear regression"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> workers;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run every replication and strategy arm in a config file");
  run->add_option("config", config_path, "Path to a key = value config file")->required();
  run->add_option("-o,--output-dir", output_dir, "Override output_dir from the config");
  run->add_option("-j,--workers", workers, "Override the worker count");
  run->add_flag("-q,--quiet", quiet, "Do not print a completion line");

  std::string dir;
  bool no_pct_diff = false;
  auto* agg = app.add_subcommand("aggregate", "Rebuild curves.csv from records.csv in a run directory");
  agg->add_option("dir", dir, "Run output directory")->required();
  agg->add_flag("--no-pct-diff", no_pct_diff, "Skip the percentage difference against random");

  std::string profile;
  std::optional<std::string> config_out;
  bool list = false;
  auto* gen = app.add_subcommand("gen-config", "Print a reference config profile");
  gen->add_option("profile", profile, "Profile name (see --list)");
  gen->add_option("-o,--output", config_out, "Write to a file instead of stdout");
  gen->add_flag("--list", list, "List available profiles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, output_dir, workers, quiet);
    if (*agg) return cmd_aggregate(dir, no_pct_diff);
    if (*gen) {
      if (list) {
        for (const auto& name : stream_al::profile_names()) std::cout << name << "\n";
        return kExitOk;
      }
      if (profile.empty()) throw stream_al::ConfigError("gen-config needs a profile name (see --list)");
      return cmd_gen_config(profile, config_out);
    }
  } catch (const stream_al::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
