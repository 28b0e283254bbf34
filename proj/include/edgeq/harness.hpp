#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "edgeq/agent.hpp"
#include "edgeq/config.hpp"
#include "edgeq/policy.hpp"

namespace edgeq {

// One strategy evaluated on one seed's paired evaluation workloads.
struct MetricsRow {
  Strategy strategy = Strategy::kLocalOnly;
  std::uint64_t seed = 0;
  double avg_energy_mwh = 0.0;        // per device per episode
  double avg_delay_ms = 0.0;          // mean over completed tasks
  double edge_utilization_pct = 0.0;  // time-averaged, in percent
  std::uint64_t trace_checksum = 0;   // hash of the eval workloads
};

struct StrategySummary {
  Strategy strategy = Strategy::kLocalOnly;
  double energy_mean = 0.0, energy_stdev = 0.0;
  double delay_mean = 0.0, delay_stdev = 0.0;
  double utilization_mean = 0.0, utilization_stdev = 0.0;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;  // strategy canonical order, then seed
  std::vector<StrategySummary> summary;
};

struct LoadSweepReport {
  std::vector<LoadTier> tiers;
  std::vector<MetricsReport> per_tier;  // parallel to tiers
};

struct DimSeries {
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::vector<double> losses;  // per-episode mean TD loss
  double initial_loss = 0.0;
  // First episode whose trailing moving-average loss drops below the
  // threshold; equals losses.size() when never reached.
  std::size_t episodes_to_threshold = 0;
};

struct DimSweepReport {
  std::vector<std::size_t> dims;
  double threshold = 0.0;  // fraction of the smallest dim's mean initial loss
  std::size_t smoothing_window = 0;
  std::vector<DimSeries> series;  // dim order, then seed
};

struct Report {
  std::optional<MetricsReport> comparison;
  std::optional<LoadSweepReport> load_sweep;
  std::optional<DimSweepReport> dim_sweep;
};

// Evaluation counters for one policy over a set of episodes.
struct EvalResult {
  double avg_energy_mwh = 0.0;
  double avg_delay_ms = 0.0;
  double utilization = 0.0;  // [0,1]
  std::uint64_t trace_checksum = 0;
  std::size_t completed_tasks = 0;
};

// Runs the policy greedily for `episodes` episodes on environments built from
// derive_seed(eval_seed, episode); paired across policies by construction.
EvalResult evaluate_policy(Policy& policy, const EnvFactory& make_env,
                           const CollabGraph& graph, std::size_t episodes,
                           std::uint64_t eval_seed, AggregationKind aggregation,
                           std::size_t aggregation_stride);

// Environment factory for one experiment seed; the salt separates training
// from evaluation workload streams.
EnvFactory make_env_factory(const ExperimentConfig& cfg, std::uint64_t salt);

// Trains (when requested) and evaluates every configured strategy on every
// seed with paired evaluation workloads.
MetricsReport run_comparison(const ExperimentConfig& cfg);

LoadSweepReport run_load_sweep(const ExperimentConfig& cfg,
                               const std::vector<LoadTier>& tiers);

DimSweepReport run_dim_sweep(const ExperimentConfig& cfg,
                             const std::vector<std::size_t>& dims);

// Writes comparison.csv, comparison.json, load_sweep.csv and dim_sweep.csv
// into dir (creating it); absent sections produce header-only CSVs. Output
// bytes are a pure function of the report.
void emit_report(const Report& report, const std::filesystem::path& dir);

// 10-episode trailing moving average used for convergence detection.
std::vector<double> moving_average(const std::vector<double>& xs, std::size_t window);

}  // namespace edgeq
