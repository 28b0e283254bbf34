#include "edgeq/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "edgeq/embed.hpp"
#include "json.hpp"

namespace edgeq {

namespace {

// Separate workload streams for training and evaluation.
constexpr std::uint64_t kTrainSalt = 0x747261696eULL;
constexpr std::uint64_t kEvalSalt = 0x6576616cULL;
// Per-seed derivations.
constexpr std::uint64_t kTrainMasterSalt = 101;
constexpr std::uint64_t kEvalMasterSalt = 202;
constexpr std::uint64_t kPolicySalt = 303;
constexpr std::uint64_t kDimNoiseSalt = 404;

TopologySpec resolved_topology(const ExperimentConfig& cfg) {
  TopologySpec spec = cfg.topology;
  if (spec.kind == Topology::kEdgeCluster && spec.cluster_count == 0) {
    spec.cluster_count = cfg.env.n_edge_nodes;
  }
  return spec;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (const double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stdev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double acc = 0.0;
  for (const double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

std::uint64_t mix_hash(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t strategy_rank(Strategy s) {
  for (std::size_t i = 0; i < kStrategyOrder.size(); ++i) {
    if (kStrategyOrder[i] == s) return i;
  }
  return kStrategyOrder.size();
}

std::vector<StrategySummary> summarize(const std::vector<MetricsRow>& rows) {
  std::vector<StrategySummary> out;
  for (const Strategy s : kStrategyOrder) {
    std::vector<double> energy, delay, util;
    for (const MetricsRow& r : rows) {
      if (r.strategy != s) continue;
      energy.push_back(r.avg_energy_mwh);
      delay.push_back(r.avg_delay_ms);
      util.push_back(r.edge_utilization_pct);
    }
    if (energy.empty()) continue;
    StrategySummary sum;
    sum.strategy = s;
    sum.energy_mean = mean_of(energy);
    sum.energy_stdev = stdev_of(energy);
    sum.delay_mean = mean_of(delay);
    sum.delay_stdev = stdev_of(delay);
    sum.utilization_mean = mean_of(util);
    sum.utilization_stdev = stdev_of(util);
    out.push_back(sum);
  }
  return out;
}

void require_valid(const ExperimentConfig& cfg) {
  auto errs = validate(cfg);
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

nlohmann::ordered_json report_to_json(const MetricsReport& rep) {
  nlohmann::ordered_json out;
  auto& rows = out["rows"] = nlohmann::ordered_json::array();
  for (const MetricsRow& r : rep.rows) {
    nlohmann::ordered_json jr;
    jr["strategy"] = to_string(r.strategy);
    jr["seed"] = r.seed;
    jr["avg_energy_mwh"] = r.avg_energy_mwh;
    jr["avg_delay_ms"] = r.avg_delay_ms;
    jr["edge_utilization_pct"] = r.edge_utilization_pct;
    jr["trace_checksum"] = fmt::format("{:016x}", r.trace_checksum);
    rows.push_back(std::move(jr));
  }
  auto& summary = out["summary"] = nlohmann::ordered_json::array();
  for (const StrategySummary& s : rep.summary) {
    nlohmann::ordered_json js;
    js["strategy"] = to_string(s.strategy);
    js["energy_mean"] = s.energy_mean;
    js["energy_stdev"] = s.energy_stdev;
    js["delay_mean"] = s.delay_mean;
    js["delay_stdev"] = s.delay_stdev;
    js["utilization_mean"] = s.utilization_mean;
    js["utilization_stdev"] = s.utilization_stdev;
    summary.push_back(std::move(js));
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_report: cannot open '" + path.string() + "'");
  out << bytes;
  if (!out) throw std::runtime_error("emit_report: write to '" + path.string() + "' failed");
}

}  // namespace

std::vector<double> moving_average(const std::vector<double>& xs, std::size_t window) {
  if (window == 0) window = 1;
  std::vector<double> out(xs.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    acc += xs[i];
    if (i >= window) acc -= xs[i - window];
    const std::size_t n = std::min(i + 1, window);
    out[i] = acc / static_cast<double>(n);
  }
  return out;
}

EnvFactory make_env_factory(const ExperimentConfig& cfg, std::uint64_t salt) {
  EnvConfig env = cfg.env;
  env.n_devices = cfg.n_devices;
  std::optional<Trace> fixed;
  if (cfg.trace_path) {
    Trace t = load_trace(*cfg.trace_path);
    if (t.n_devices() > env.n_devices) {
      throw ConfigError({fmt::format(
          "config.trace_path: trace uses {} devices but config has n_devices={}",
          t.n_devices(), env.n_devices)});
    }
    t.horizon_steps = std::max(t.horizon_steps, cfg.horizon_steps);
    fixed = std::move(t);
  }
  const LoadTier tier = cfg.load_tier;
  const TierRates rates = cfg.tier_rates;
  const TaskSizeModel sizes = cfg.task_sizes;
  const std::int64_t horizon = cfg.horizon_steps;

  return [env, fixed, tier, rates, sizes, horizon, salt](std::uint64_t episode_seed)
             -> std::unique_ptr<Env> {
    const std::uint64_t s = derive_seed(episode_seed, salt);
    Trace trace = fixed ? *fixed
                        : generate_trace(env.n_devices, tier, horizon,
                                         derive_seed(s, 1), rates, sizes);
    return std::make_unique<EdgeEnv>(env, std::move(trace), derive_seed(s, 2));
  };
}

EvalResult evaluate_policy(Policy& policy, const EnvFactory& make_env,
                           const CollabGraph& graph, std::size_t episodes,
                           std::uint64_t eval_seed, AggregationKind aggregation,
                           std::size_t aggregation_stride) {
  if (episodes == 0) throw std::invalid_argument("evaluate_policy: episodes must be >= 1");

  double energy_total = 0.0;
  double delay_sum = 0.0;
  std::size_t delay_count = 0;
  double util_sum = 0.0;
  std::size_t steps = 0;
  std::size_t n_devices = 0;
  std::uint64_t checksum = 0xcbf29ce484222325ULL;

  for (std::size_t ep = 0; ep < episodes; ++ep) {
    auto env = make_env(derive_seed(eval_seed, ep));
    if (env == nullptr) throw std::invalid_argument("evaluate_policy: factory returned null");
    n_devices = env->n_devices();
    checksum = mix_hash(checksum, env->content_hash());

    JointObserver observer(&graph, aggregation, aggregation_stride);
    std::int64_t t = 0;
    std::vector<JointState> joints = observer.observe_all(*env, t);
    std::vector<Action> actions(n_devices);
    while (!env->terminal()) {
      for (std::size_t i = 0; i < n_devices; ++i) {
        actions[i] = policy.decide(i, joints[i]);
      }
      const StepOutcome outcome = env->step(actions);
      ++t;
      for (const double e : outcome.energy_mwh) energy_total += e;
      for (const double d : outcome.completed_task_delays_ms) {
        delay_sum += d;
        ++delay_count;
      }
      util_sum += outcome.edge_utilization;
      ++steps;
      if (!env->terminal()) joints = observer.observe_all(*env, t);
    }
  }

  EvalResult res;
  res.avg_energy_mwh =
      energy_total / (static_cast<double>(episodes) * static_cast<double>(n_devices));
  res.avg_delay_ms = delay_count > 0 ? delay_sum / static_cast<double>(delay_count) : 0.0;
  res.utilization = steps > 0 ? util_sum / static_cast<double>(steps) : 0.0;
  res.trace_checksum = checksum;
  res.completed_tasks = delay_count;
  return res;
}

MetricsReport run_comparison(const ExperimentConfig& cfg) {
  require_valid(cfg);
  const CollabGraph graph = build_graph(cfg.n_devices, resolved_topology(cfg));
  const bool wants_dqn =
      std::find(cfg.strategies.begin(), cfg.strategies.end(), Strategy::kDqn) !=
      cfg.strategies.end();

  MetricsReport report;
  for (const std::uint64_t seed : cfg.seeds) {
    const std::uint64_t train_master = derive_seed(seed, kTrainMasterSalt);
    const std::uint64_t eval_master = derive_seed(seed, kEvalMasterSalt);

    std::optional<TrainResult> trained;
    if (wants_dqn) {
      TrainOptions opts;
      opts.episodes = cfg.train_episodes;
      opts.seed = train_master;
      opts.aggregation = cfg.aggregation;
      opts.aggregation_stride = cfg.aggregation_stride;
      trained = train(make_env_factory(cfg, kTrainSalt), graph, cfg.agent, opts);
    }

    const EnvFactory eval_factory = make_env_factory(cfg, kEvalSalt);
    for (const Strategy s : cfg.strategies) {
      std::unique_ptr<Policy> policy;
      GreedyQPolicy greedy(nullptr);
      Policy* chosen = nullptr;
      if (s == Strategy::kDqn) {
        greedy = GreedyQPolicy(&trained->net);
        chosen = &greedy;
      } else {
        policy = make_baseline(s, cfg.n_devices, derive_seed(seed, kPolicySalt));
        chosen = policy.get();
      }
      const EvalResult ev =
          evaluate_policy(*chosen, eval_factory, graph, cfg.eval_episodes, eval_master,
                          cfg.aggregation, cfg.aggregation_stride);
      MetricsRow row;
      row.strategy = s;
      row.seed = seed;
      row.avg_energy_mwh = ev.avg_energy_mwh;
      row.avg_delay_ms = ev.avg_delay_ms;
      row.edge_utilization_pct = 100.0 * ev.utilization;
      row.trace_checksum = ev.trace_checksum;
      report.rows.push_back(row);
    }
  }

  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const MetricsRow& a, const MetricsRow& b) {
                     const auto ra = strategy_rank(a.strategy), rb = strategy_rank(b.strategy);
                     return ra != rb ? ra < rb : a.seed < b.seed;
                   });
  report.summary = summarize(report.rows);
  return report;
}

LoadSweepReport run_load_sweep(const ExperimentConfig& cfg,
                               const std::vector<LoadTier>& tiers) {
  if (tiers.empty()) {
    throw std::invalid_argument("run_load_sweep: need at least one tier");
  }
  LoadSweepReport report;
  for (const LoadTier tier : tiers) {
    ExperimentConfig tier_cfg = cfg;
    tier_cfg.load_tier = tier;
    report.tiers.push_back(tier);
    report.per_tier.push_back(run_comparison(tier_cfg));
  }
  return report;
}

DimSweepReport run_dim_sweep(const ExperimentConfig& cfg,
                             const std::vector<std::size_t>& dims) {
  require_valid(cfg);
  if (dims.empty()) throw std::invalid_argument("run_dim_sweep: need at least one dim");
  std::vector<std::size_t> sorted_dims = dims;
  std::sort(sorted_dims.begin(), sorted_dims.end());
  sorted_dims.erase(std::unique(sorted_dims.begin(), sorted_dims.end()), sorted_dims.end());
  for (const std::size_t d : sorted_dims) {
    if (d < EmbeddedEnv::kCoreDim) {
      throw std::invalid_argument(
          fmt::format("run_dim_sweep: dim {} is below the core feature arity {}", d,
                      EmbeddedEnv::kCoreDim));
    }
  }

  const CollabGraph graph = build_graph(cfg.n_devices, resolved_topology(cfg));
  DimSweepReport report;
  report.dims = sorted_dims;
  report.smoothing_window = 10;

  for (const std::size_t dim : sorted_dims) {
    for (const std::uint64_t seed : cfg.seeds) {
      const EnvFactory base = make_env_factory(cfg, kTrainSalt);
      const EnvFactory wrapped = [base, dim](std::uint64_t episode_seed) -> std::unique_ptr<Env> {
        return std::make_unique<EmbeddedEnv>(base(episode_seed), dim,
                                             derive_seed(episode_seed, kDimNoiseSalt));
      };
      TrainOptions opts;
      opts.episodes = cfg.train_episodes;
      opts.seed = derive_seed(seed, kTrainMasterSalt);
      opts.aggregation = cfg.aggregation;
      opts.aggregation_stride = cfg.aggregation_stride;
      const TrainResult res = train(wrapped, graph, cfg.agent, opts);

      DimSeries series;
      series.dim = dim;
      series.seed = seed;
      series.losses.reserve(res.log.size());
      for (const EpisodeStats& st : res.log) series.losses.push_back(st.mean_loss);
      series.initial_loss = series.losses.empty() ? 0.0 : series.losses.front();
      report.series.push_back(std::move(series));
    }
  }

  // Threshold: 20% of the smallest dim's mean initial loss.
  std::vector<double> base_initials;
  for (const DimSeries& s : report.series) {
    if (s.dim == sorted_dims.front()) base_initials.push_back(s.initial_loss);
  }
  report.threshold = 0.2 * mean_of(base_initials);

  for (DimSeries& s : report.series) {
    const std::vector<double> smoothed = moving_average(s.losses, report.smoothing_window);
    s.episodes_to_threshold = s.losses.size();
    for (std::size_t i = 0; i < smoothed.size(); ++i) {
      if (smoothed[i] < report.threshold) {
        s.episodes_to_threshold = i;
        break;
      }
    }
  }
  return report;
}

void emit_report(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    std::string csv = "strategy,seed,avg_energy_mwh,avg_delay_ms,edge_utilization_pct\n";
    if (report.comparison) {
      for (const MetricsRow& r : report.comparison->rows) {
        csv += fmt::format("{},{},{:.6g},{:.6g},{:.6g}\n", to_string(r.strategy), r.seed,
                           r.avg_energy_mwh, r.avg_delay_ms, r.edge_utilization_pct);
      }
    }
    write_file(dir / "comparison.csv", csv);
  }

  {
    std::string csv = "tier,strategy,seed,avg_energy_mwh,avg_delay_ms,edge_utilization_pct\n";
    if (report.load_sweep) {
      for (std::size_t i = 0; i < report.load_sweep->tiers.size(); ++i) {
        const char* tier = to_string(report.load_sweep->tiers[i]);
        for (const MetricsRow& r : report.load_sweep->per_tier[i].rows) {
          csv += fmt::format("{},{},{},{:.6g},{:.6g},{:.6g}\n", tier, to_string(r.strategy),
                             r.seed, r.avg_energy_mwh, r.avg_delay_ms,
                             r.edge_utilization_pct);
        }
      }
    }
    write_file(dir / "load_sweep.csv", csv);
  }

  {
    std::string csv = "dim,seed,episode,loss\n";
    if (report.dim_sweep) {
      for (const DimSeries& s : report.dim_sweep->series) {
        for (std::size_t ep = 0; ep < s.losses.size(); ++ep) {
          csv += fmt::format("{},{},{},{:.6g}\n", s.dim, s.seed, ep, s.losses[ep]);
        }
      }
    }
    write_file(dir / "dim_sweep.csv", csv);
  }

  {
    nlohmann::ordered_json doc;
    doc["comparison"] = report.comparison ? report_to_json(*report.comparison)
                                          : nlohmann::ordered_json(nullptr);
    if (report.load_sweep) {
      nlohmann::ordered_json sweep;
      sweep["tiers"] = nlohmann::ordered_json::array();
      sweep["per_tier"] = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < report.load_sweep->tiers.size(); ++i) {
        sweep["tiers"].push_back(to_string(report.load_sweep->tiers[i]));
        sweep["per_tier"].push_back(report_to_json(report.load_sweep->per_tier[i]));
      }
      doc["load_sweep"] = std::move(sweep);
    } else {
      doc["load_sweep"] = nullptr;
    }
    if (report.dim_sweep) {
      nlohmann::ordered_json sweep;
      sweep["threshold"] = report.dim_sweep->threshold;
      sweep["smoothing_window"] = report.dim_sweep->smoothing_window;
      sweep["series"] = nlohmann::ordered_json::array();
      for (const DimSeries& s : report.dim_sweep->series) {
        nlohmann::ordered_json js;
        js["dim"] = s.dim;
        js["seed"] = s.seed;
        js["initial_loss"] = s.initial_loss;
        js["episodes_to_threshold"] = s.episodes_to_threshold;
        sweep["series"].push_back(std::move(js));
      }
      doc["dim_sweep"] = std::move(sweep);
    } else {
      doc["dim_sweep"] = nullptr;
    }
    write_file(dir / "comparison.json", doc.dump(2) + "\n");
  }
}

}  // namespace edgeq
