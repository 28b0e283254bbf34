// Command-line front end: runs the comparison/load/dimension experiments,
// generates workload traces, and validates config files.
//
// Exit codes: 0 success, 2 configuration or usage error, 1 runtime error.

#include <fmt/format.h>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edgeq/config.hpp"
#include "edgeq/harness.hpp"

namespace {

using namespace edgeq;

ExperimentConfig load_or_default(const std::optional<std::string>& config_path) {
  if (config_path) return load_config(*config_path);
  ExperimentConfig cfg;
  cfg.env.n_devices = cfg.n_devices;
  if (cfg.topology.kind == Topology::kEdgeCluster && cfg.topology.cluster_count == 0) {
    cfg.topology.cluster_count = cfg.env.n_edge_nodes;
  }
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const std::optional<std::size_t>& seeds,
                     const std::optional<std::size_t>& episodes,
                     const std::optional<std::string>& out_dir) {
  if (seeds) {
    cfg.seeds.clear();
    for (std::size_t i = 0; i < *seeds; ++i) cfg.seeds.push_back(i);
  }
  if (episodes) cfg.train_episodes = *episodes;
  if (out_dir) cfg.out_dir = *out_dir;
  auto errs = validate(cfg);
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

void print_summary(const MetricsReport& report) {
  fmt::print("{:<12} {:>16} {:>14} {:>16}\n", "strategy", "energy_mwh", "delay_ms",
             "utilization_pct");
  for (const StrategySummary& s : report.summary) {
    fmt::print("{:<12} {:>8.2f} ± {:<5.2f} {:>7.1f} ± {:<5.1f} {:>8.1f} ± {:<5.1f}\n",
               to_string(s.strategy), s.energy_mean, s.energy_stdev, s.delay_mean,
               s.delay_stdev, s.utilization_mean, s.utilization_stdev);
  }
}

int cmd_compare(const std::optional<std::string>& config_path,
                const std::optional<std::size_t>& seeds,
                const std::optional<std::size_t>& episodes,
                const std::optional<std::string>& out_dir) {
  ExperimentConfig cfg = load_or_default(config_path);
  apply_overrides(cfg, seeds, episodes, out_dir);
  Report report;
  report.comparison = run_comparison(cfg);
  emit_report(report, cfg.out_dir);
  print_summary(*report.comparison);
  fmt::print("wrote {}/comparison.csv and comparison.json\n", cfg.out_dir);
  return 0;
}

int cmd_sweep_load(const std::optional<std::string>& config_path,
                   const std::vector<std::string>& tier_names,
                   const std::optional<std::size_t>& seeds,
                   const std::optional<std::size_t>& episodes,
                   const std::optional<std::string>& out_dir) {
  ExperimentConfig cfg = load_or_default(config_path);
  apply_overrides(cfg, seeds, episodes, out_dir);
  std::vector<LoadTier> tiers;
  for (const std::string& name : tier_names) {
    try {
      tiers.push_back(load_tier_from_string(name));
    } catch (const std::invalid_argument& e) {
      throw ConfigError({std::string("--tiers: ") + e.what()});
    }
  }
  Report report;
  report.load_sweep = run_load_sweep(cfg, tiers);
  emit_report(report, cfg.out_dir);
  for (std::size_t i = 0; i < report.load_sweep->tiers.size(); ++i) {
    fmt::print("--- tier {} ---\n", to_string(report.load_sweep->tiers[i]));
    print_summary(report.load_sweep->per_tier[i]);
  }
  fmt::print("wrote {}/load_sweep.csv\n", cfg.out_dir);
  return 0;
}

int cmd_sweep_dim(const std::optional<std::string>& config_path,
                  const std::vector<std::size_t>& dims,
                  const std::optional<std::size_t>& seeds,
                  const std::optional<std::size_t>& episodes,
                  const std::optional<std::string>& out_dir) {
  ExperimentConfig cfg = load_or_default(config_path);
  apply_overrides(cfg, seeds, episodes, out_dir);
  Report report;
  report.dim_sweep = run_dim_sweep(cfg, dims);
  emit_report(report, cfg.out_dir);
  fmt::print("threshold {:.6g} (smoothing window {})\n", report.dim_sweep->threshold,
             report.dim_sweep->smoothing_window);
  for (const std::size_t dim : report.dim_sweep->dims) {
    std::vector<double> eps, init;
    for (const DimSeries& s : report.dim_sweep->series) {
      if (s.dim != dim) continue;
      eps.push_back(static_cast<double>(s.episodes_to_threshold));
      init.push_back(s.initial_loss);
    }
    double eps_mean = 0.0, init_mean = 0.0;
    for (const double e : eps) eps_mean += e;
    for (const double v : init) init_mean += v;
    eps_mean /= static_cast<double>(eps.size());
    init_mean /= static_cast<double>(init.size());
    fmt::print("dim {:>3}: mean episodes-to-threshold {:.1f}, mean initial loss {:.4f}\n",
               dim, eps_mean, init_mean);
  }
  fmt::print("wrote {}/dim_sweep.csv\n", cfg.out_dir);
  return 0;
}

int cmd_gen_trace(std::size_t devices, const std::string& tier_name, std::int64_t horizon,
                  std::uint64_t seed, const std::string& out_path) {
  LoadTier tier;
  try {
    tier = load_tier_from_string(tier_name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError({std::string("--tier: ") + e.what()});
  }
  const Trace trace = generate_trace(devices, tier, horizon, seed);
  write_trace(trace, out_path);
  fmt::print("wrote {} tasks for {} devices over {} steps to {}\n", trace.total_tasks(),
             devices, horizon, out_path);
  return 0;
}

int cmd_validate(const std::string& config_path) {
  load_config(config_path);
  fmt::print("{}: ok\n", config_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edgeq: deterministic edge-scheduling experiments"};
  app.require_subcommand(1);

  std::optional<std::string> config_path, out_dir;
  std::optional<std::size_t> seeds, episodes;

  auto* compare = app.add_subcommand("compare", "train and compare all scheduling strategies");
  compare->add_option("--config", config_path, "JSON experiment config");
  compare->add_option("--seeds", seeds, "use seeds 0..N-1");
  compare->add_option("--episodes", episodes, "override training episode count");
  compare->add_option("--out", out_dir, "output directory");

  std::vector<std::string> tier_names = {"low", "medium", "high"};
  auto* sweep_load = app.add_subcommand("sweep-load", "compare strategies across load tiers");
  sweep_load->add_option("--config", config_path, "JSON experiment config");
  sweep_load->add_option("--tiers", tier_names, "tiers to sweep")->delimiter(',');
  sweep_load->add_option("--seeds", seeds, "use seeds 0..N-1");
  sweep_load->add_option("--episodes", episodes, "override training episode count");
  sweep_load->add_option("--out", out_dir, "output directory");

  std::vector<std::size_t> dims = {4, 8, 16, 32, 64};
  auto* sweep_dim = app.add_subcommand("sweep-dim", "training convergence vs state dimension");
  sweep_dim->add_option("--config", config_path, "JSON experiment config");
  sweep_dim->add_option("--dims", dims, "per-device state dimensions")->delimiter(',');
  sweep_dim->add_option("--seeds", seeds, "use seeds 0..N-1");
  sweep_dim->add_option("--episodes", episodes, "override training episode count");
  sweep_dim->add_option("--out", out_dir, "output directory");

  std::size_t gt_devices = 8;
  std::string gt_tier = "medium";
  std::int64_t gt_horizon = 200;
  std::uint64_t gt_seed = 0;
  std::string gt_out;
  auto* gen_trace = app.add_subcommand("gen-trace", "generate a synthetic workload trace CSV");
  gen_trace->add_option("--devices", gt_devices, "device count");
  gen_trace->add_option("--tier", gt_tier, "load tier (low|medium|high)");
  gen_trace->add_option("--horizon", gt_horizon, "steps");
  gen_trace->add_option("--seed", gt_seed, "generator seed");
  gen_trace->add_option("--out", gt_out, "output CSV path")->required();

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate-config", "check a config file");
  validate_cmd->add_option("file", validate_path, "JSON config path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (compare->parsed()) return cmd_compare(config_path, seeds, episodes, out_dir);
    if (sweep_load->parsed()) {
      return cmd_sweep_load(config_path, tier_names, seeds, episodes, out_dir);
    }
    if (sweep_dim->parsed()) return cmd_sweep_dim(config_path, dims, seeds, episodes, out_dir);
    if (gen_trace->parsed()) {
      return cmd_gen_trace(gt_devices, gt_tier, gt_horizon, gt_seed, gt_out);
    }
    if (validate_cmd->parsed()) return cmd_validate(validate_path);
  } catch (const edgeq::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;  // no subcommand matched (require_subcommand should prevent this)
}
