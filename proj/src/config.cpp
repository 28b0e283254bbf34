#include "edgeq/config.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include "json.hpp"

namespace edgeq {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Collects violations instead of failing fast so a bad config reports
// everything wrong with it in one pass.
struct Parser {
  std::vector<std::string>& errs;

  void fail(const std::string& path, const std::string& msg) {
    errs.push_back(path + ": " + msg);
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
      (void)value;
      bool ok = false;
      for (const char* k : known) {
        if (key == k) {
          ok = true;
          break;
        }
      }
      if (!ok) fail(path + "." + key, "unknown key");
    }
  }

  template <typename T>
  void number(const json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) {
        fail(path + "." + key, "expected a number");
        return;
      }
      out = v.get<double>();
    } else {
      if (!v.is_number_integer()) {
        fail(path + "." + key, "expected an integer");
        return;
      }
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
          fail(path + "." + key, "expected a non-negative integer");
          return;
        }
      }
      out = v.get<T>();
    }
  }

  bool string(const json& obj, const std::string& path, const char* key, std::string& out) {
    if (!obj.contains(key)) return false;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      fail(path + "." + key, "expected a string");
      return false;
    }
    out = v.get<std::string>();
    return true;
  }
};

void parse_reward(Parser& p, const json& obj, const std::string& path, RewardWeights& w) {
  p.check_keys(obj, path, {"alpha", "beta", "gamma_u"});
  p.number(obj, path, "alpha", w.alpha);
  p.number(obj, path, "beta", w.beta);
  p.number(obj, path, "gamma_u", w.gamma_u);
}

void parse_env(Parser& p, const json& obj, const std::string& path, EnvConfig& env) {
  p.check_keys(obj, path,
               {"node_capacity_units", "congestion_knee", "congestion_slope",
                "efficiency_floor", "idle_energy_mwh", "cpu_energy_mwh_per_unit",
                "tx_energy_mwh_per_kb", "local_speed_units_per_ms",
                "edge_speed_units_per_ms", "bandwidth_kb_per_ms", "delay_penalty_ms",
                "battery_capacity_mwh", "queue_norm_cap", "compute_demand_max",
                "network_quality_min", "network_quality_max"});
  p.number(obj, path, "node_capacity_units", env.node_capacity_units);
  p.number(obj, path, "congestion_knee", env.congestion_knee);
  p.number(obj, path, "congestion_slope", env.congestion_slope);
  p.number(obj, path, "efficiency_floor", env.efficiency_floor);
  p.number(obj, path, "idle_energy_mwh", env.idle_energy_mwh);
  p.number(obj, path, "cpu_energy_mwh_per_unit", env.cpu_energy_mwh_per_unit);
  p.number(obj, path, "tx_energy_mwh_per_kb", env.tx_energy_mwh_per_kb);
  p.number(obj, path, "local_speed_units_per_ms", env.local_speed_units_per_ms);
  p.number(obj, path, "edge_speed_units_per_ms", env.edge_speed_units_per_ms);
  p.number(obj, path, "bandwidth_kb_per_ms", env.bandwidth_kb_per_ms);
  p.number(obj, path, "delay_penalty_ms", env.delay_penalty_ms);
  p.number(obj, path, "battery_capacity_mwh", env.battery_capacity_mwh);
  p.number(obj, path, "queue_norm_cap", env.queue_norm_cap);
  p.number(obj, path, "compute_demand_max", env.compute_demand_max);
  p.number(obj, path, "network_quality_min", env.network_quality_min);
  p.number(obj, path, "network_quality_max", env.network_quality_max);
}

void parse_agent(Parser& p, const json& obj, const std::string& path, AgentHyperparams& hp) {
  p.check_keys(obj, path,
               {"hidden_layers", "learning_rate", "discount", "epsilon_start",
                "epsilon_min", "epsilon_decay", "batch_size", "target_sync_interval",
                "replay_capacity"});
  if (obj.contains("hidden_layers")) {
    const json& v = obj.at("hidden_layers");
    if (!v.is_array()) {
      p.fail(path + ".hidden_layers", "expected an array of layer widths");
    } else {
      std::vector<std::size_t> widths;
      bool ok = true;
      for (const auto& item : v) {
        if (!item.is_number_integer() || item.get<std::int64_t>() < 1) {
          p.fail(path + ".hidden_layers", "layer widths must be integers >= 1");
          ok = false;
          break;
        }
        widths.push_back(item.get<std::size_t>());
      }
      if (ok) hp.hidden_layers = std::move(widths);
    }
  }
  p.number(obj, path, "learning_rate", hp.learning_rate);
  p.number(obj, path, "discount", hp.discount);
  p.number(obj, path, "epsilon_start", hp.epsilon_start);
  p.number(obj, path, "epsilon_min", hp.epsilon_min);
  p.number(obj, path, "epsilon_decay", hp.epsilon_decay);
  p.number(obj, path, "batch_size", hp.batch_size);
  p.number(obj, path, "target_sync_interval", hp.target_sync_interval);
  p.number(obj, path, "replay_capacity", hp.replay_capacity);
}

void parse_topology(Parser& p, const json& v, const std::string& path, TopologySpec& spec) {
  if (v.is_string()) {
    try {
      spec.kind = topology_from_string(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      p.fail(path, e.what());
    }
    return;
  }
  if (!v.is_object()) {
    p.fail(path, "expected a topology name or an object");
    return;
  }
  p.check_keys(v, path, {"kind", "clusters", "edges"});
  std::string kind;
  if (!p.string(v, path, "kind", kind)) {
    p.fail(path + ".kind", "required");
    return;
  }
  try {
    spec.kind = topology_from_string(kind);
  } catch (const std::invalid_argument& e) {
    p.fail(path + ".kind", e.what());
    return;
  }
  p.number(v, path, "clusters", spec.cluster_count);
  if (v.contains("edges")) {
    const json& edges = v.at("edges");
    if (!edges.is_array()) {
      p.fail(path + ".edges", "expected an array of [a,b] pairs");
      return;
    }
    spec.edges.clear();
    for (const auto& e : edges) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
          !e[1].is_number_integer() || e[0].get<std::int64_t>() < 0 ||
          e[1].get<std::int64_t>() < 0) {
        p.fail(path + ".edges", "each edge must be a pair of device indices");
        return;
      }
      spec.edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
    }
  }
}

void parse_strategies(Parser& p, const json& v, const std::string& path,
                      std::vector<Strategy>& out) {
  const auto one = [&p, &path](const json& item) -> std::optional<Strategy> {
    if (!item.is_string()) {
      p.fail(path, "expected strategy name(s)");
      return std::nullopt;
    }
    try {
      return strategy_from_string(item.get<std::string>());
    } catch (const std::invalid_argument& e) {
      p.fail(path, e.what());
      return std::nullopt;
    }
  };
  if (v.is_string()) {
    if (const auto s = one(v)) out = {*s};
    return;
  }
  if (!v.is_array()) {
    p.fail(path, "expected a strategy name or an array of them");
    return;
  }
  std::vector<Strategy> parsed;
  for (const auto& item : v) {
    const auto s = one(item);
    if (!s) return;
    parsed.push_back(*s);
  }
  out = std::move(parsed);
}

void parse_seeds(Parser& p, const json& v, const std::string& path,
                 std::vector<std::uint64_t>& out) {
  if (v.is_number_integer()) {
    const std::int64_t n = v.get<std::int64_t>();
    if (n < 1) {
      p.fail(path, "seed count must be >= 1");
      return;
    }
    out.clear();
    for (std::int64_t i = 0; i < n; ++i) out.push_back(static_cast<std::uint64_t>(i));
    return;
  }
  if (!v.is_array()) {
    p.fail(path, "expected a seed count or an array of seeds");
    return;
  }
  std::vector<std::uint64_t> seeds;
  for (const auto& item : v) {
    if (!item.is_number_integer() || item.get<std::int64_t>() < 0) {
      p.fail(path, "seeds must be non-negative integers");
      return;
    }
    seeds.push_back(item.get<std::uint64_t>());
  }
  out = std::move(seeds);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error("invalid configuration:\n  " + join(violations, "\n  ")),
      violations_(std::move(violations)) {}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  std::vector<std::string> errs;
  const auto fail = [&errs](const std::string& msg) { errs.push_back(msg); };

  if (cfg.n_devices == 0) fail("config.n_devices: must be >= 1");
  if (cfg.env.n_edge_nodes == 0) fail("config.n_edge_nodes: must be >= 1");
  if (cfg.horizon_steps < 1) fail("config.horizon: must be >= 1");
  if (cfg.train_episodes == 0) fail("config.episodes: must be >= 1");
  if (cfg.eval_episodes == 0) fail("config.eval_episodes: must be >= 1");
  if (cfg.aggregation_stride == 0) fail("config.aggregation_stride: must be >= 1");
  if (cfg.seeds.empty()) fail("config.seeds: must not be empty");
  if (cfg.strategies.empty()) fail("config.strategy: must not be empty");
  {
    std::set<Strategy> seen;
    for (const Strategy s : cfg.strategies) {
      if (!seen.insert(s).second) {
        fail("config.strategy: duplicate strategy '" + to_string(s) + "'");
      }
    }
  }
  if (cfg.topology.kind == Topology::kExplicit) {
    for (const auto& [a, b] : cfg.topology.edges) {
      if (a >= cfg.n_devices || b >= cfg.n_devices) {
        fail(fmt::format("config.topology.edges: edge ({},{}) out of range for {} devices",
                         a, b, cfg.n_devices));
      } else if (a == b) {
        fail(fmt::format("config.topology.edges: self-loop on device {}", a));
      }
    }
  }
  if (cfg.trace_path && !std::filesystem::exists(*cfg.trace_path)) {
    fail("config.trace_path: file '" + *cfg.trace_path + "' does not exist");
  }

  const EnvConfig& env = cfg.env;
  if (!(env.node_capacity_units > 0.0)) fail("config.env.node_capacity_units: must be > 0");
  if (!(env.congestion_knee >= 0.0)) fail("config.env.congestion_knee: must be >= 0");
  if (!(env.congestion_slope >= 0.0)) fail("config.env.congestion_slope: must be >= 0");
  if (!(env.efficiency_floor > 0.0) || !(env.efficiency_floor <= 1.0)) {
    fail("config.env.efficiency_floor: must be in (0,1]");
  }
  if (!(env.idle_energy_mwh >= 0.0)) fail("config.env.idle_energy_mwh: must be >= 0");
  if (!(env.cpu_energy_mwh_per_unit >= 0.0)) fail("config.env.cpu_energy_mwh_per_unit: must be >= 0");
  if (!(env.tx_energy_mwh_per_kb >= 0.0)) fail("config.env.tx_energy_mwh_per_kb: must be >= 0");
  if (!(env.local_speed_units_per_ms > 0.0)) fail("config.env.local_speed_units_per_ms: must be > 0");
  if (!(env.edge_speed_units_per_ms > 0.0)) fail("config.env.edge_speed_units_per_ms: must be > 0");
  if (!(env.bandwidth_kb_per_ms > 0.0)) fail("config.env.bandwidth_kb_per_ms: must be > 0");
  if (!(env.delay_penalty_ms >= 0.0)) fail("config.env.delay_penalty_ms: must be >= 0");
  if (!(env.battery_capacity_mwh > 0.0)) fail("config.env.battery_capacity_mwh: must be > 0");
  if (!(env.queue_norm_cap > 0.0)) fail("config.env.queue_norm_cap: must be > 0");
  if (!(env.compute_demand_max > 0.0)) fail("config.env.compute_demand_max: must be > 0");
  if (!(env.network_quality_min >= 0.0) || !(env.network_quality_max <= 1.0) ||
      env.network_quality_min > env.network_quality_max) {
    fail("config.env.network_quality_min/max: need 0 <= min <= max <= 1");
  }
  if (!(env.reward.alpha >= 0.0) || !std::isfinite(env.reward.alpha)) {
    fail("config.reward_weights.alpha: must be finite and >= 0");
  }
  if (!(env.reward.beta >= 0.0) || !std::isfinite(env.reward.beta)) {
    fail("config.reward_weights.beta: must be finite and >= 0");
  }
  if (!(env.reward.gamma_u >= 0.0) || !std::isfinite(env.reward.gamma_u)) {
    fail("config.reward_weights.gamma_u: must be finite and >= 0");
  }

  const AgentHyperparams& hp = cfg.agent;
  if (!(hp.learning_rate > 0.0) || !std::isfinite(hp.learning_rate)) {
    fail("config.agent.learning_rate: must be finite and > 0");
  }
  if (!(hp.discount >= 0.0) || !(hp.discount < 1.0)) fail("config.agent.discount: must be in [0,1)");
  if (!(hp.epsilon_start >= 0.0) || !(hp.epsilon_start <= 1.0)) {
    fail("config.agent.epsilon_start: must be in [0,1]");
  }
  if (!(hp.epsilon_min >= 0.0) || !(hp.epsilon_min <= 1.0)) {
    fail("config.agent.epsilon_min: must be in [0,1]");
  }
  if (hp.epsilon_min > hp.epsilon_start) {
    fail("config.agent.epsilon_min: must be <= epsilon_start");
  }
  if (!(hp.epsilon_decay > 0.0) || !(hp.epsilon_decay <= 1.0)) {
    fail("config.agent.epsilon_decay: must be in (0,1]");
  }
  if (hp.batch_size == 0) fail("config.agent.batch_size: must be >= 1");
  if (hp.target_sync_interval == 0) fail("config.agent.target_sync_interval: must be >= 1");
  if (hp.replay_capacity < hp.batch_size) {
    fail("config.agent.replay_capacity: must be >= batch_size");
  }
  for (const std::size_t h : hp.hidden_layers) {
    if (h == 0) fail("config.agent.hidden_layers: widths must be >= 1");
  }

  if (!(cfg.tier_rates.low >= 0.0) || !(cfg.tier_rates.medium >= 0.0) ||
      !(cfg.tier_rates.high >= 0.0)) {
    fail("config.tier_rates: rates must be >= 0");
  }
  if (cfg.task_sizes.compute_min < 1 || cfg.task_sizes.compute_max < cfg.task_sizes.compute_min) {
    fail("config.task_sizes: need 1 <= compute_min <= compute_max");
  }
  if (cfg.task_sizes.data_min_kb < 0.0 || cfg.task_sizes.data_max_kb < cfg.task_sizes.data_min_kb) {
    fail("config.task_sizes: need 0 <= data_min_kb <= data_max_kb");
  }
  return errs;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError({std::string("config: not valid JSON: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"config: top level must be a JSON object"});

  ExperimentConfig cfg;
  std::vector<std::string> errs;
  Parser p{errs};

  p.check_keys(doc, "config",
               {"n_devices", "n_edge_nodes", "topology", "aggregation",
                "aggregation_stride", "strategy", "load_tier", "trace_path", "horizon",
                "episodes", "eval_episodes", "seeds", "out_dir", "reward_weights",
                "agent", "env", "tier_rates", "task_sizes"});

  p.number(doc, "config", "n_devices", cfg.n_devices);
  p.number(doc, "config", "n_edge_nodes", cfg.env.n_edge_nodes);
  if (doc.contains("topology")) parse_topology(p, doc.at("topology"), "config.topology", cfg.topology);
  std::string agg;
  if (p.string(doc, "config", "aggregation", agg)) {
    try {
      cfg.aggregation = aggregation_from_string(agg);
    } catch (const std::invalid_argument& e) {
      p.fail("config.aggregation", e.what());
    }
  }
  p.number(doc, "config", "aggregation_stride", cfg.aggregation_stride);
  if (doc.contains("strategy")) parse_strategies(p, doc.at("strategy"), "config.strategy", cfg.strategies);
  std::string tier;
  if (p.string(doc, "config", "load_tier", tier)) {
    try {
      cfg.load_tier = load_tier_from_string(tier);
    } catch (const std::invalid_argument& e) {
      p.fail("config.load_tier", e.what());
    }
  }
  std::string trace_path;
  if (p.string(doc, "config", "trace_path", trace_path)) cfg.trace_path = trace_path;
  p.number(doc, "config", "horizon", cfg.horizon_steps);
  p.number(doc, "config", "episodes", cfg.train_episodes);
  p.number(doc, "config", "eval_episodes", cfg.eval_episodes);
  if (doc.contains("seeds")) parse_seeds(p, doc.at("seeds"), "config.seeds", cfg.seeds);
  p.string(doc, "config", "out_dir", cfg.out_dir);
  if (doc.contains("reward_weights")) {
    const json& v = doc.at("reward_weights");
    if (!v.is_object()) {
      p.fail("config.reward_weights", "expected an object");
    } else {
      parse_reward(p, v, "config.reward_weights", cfg.env.reward);
    }
  }
  if (doc.contains("agent")) {
    const json& v = doc.at("agent");
    if (!v.is_object()) {
      p.fail("config.agent", "expected an object");
    } else {
      parse_agent(p, v, "config.agent", cfg.agent);
    }
  }
  if (doc.contains("env")) {
    const json& v = doc.at("env");
    if (!v.is_object()) {
      p.fail("config.env", "expected an object");
    } else {
      parse_env(p, v, "config.env", cfg.env);
    }
  }
  if (doc.contains("tier_rates")) {
    const json& v = doc.at("tier_rates");
    if (!v.is_object()) {
      p.fail("config.tier_rates", "expected an object");
    } else {
      p.check_keys(v, "config.tier_rates", {"low", "medium", "high"});
      p.number(v, "config.tier_rates", "low", cfg.tier_rates.low);
      p.number(v, "config.tier_rates", "medium", cfg.tier_rates.medium);
      p.number(v, "config.tier_rates", "high", cfg.tier_rates.high);
    }
  }
  if (doc.contains("task_sizes")) {
    const json& v = doc.at("task_sizes");
    if (!v.is_object()) {
      p.fail("config.task_sizes", "expected an object");
    } else {
      p.check_keys(v, "config.task_sizes",
                   {"compute_min", "compute_max", "data_min_kb", "data_max_kb"});
      p.number(v, "config.task_sizes", "compute_min", cfg.task_sizes.compute_min);
      p.number(v, "config.task_sizes", "compute_max", cfg.task_sizes.compute_max);
      p.number(v, "config.task_sizes", "data_min_kb", cfg.task_sizes.data_min_kb);
      p.number(v, "config.task_sizes", "data_max_kb", cfg.task_sizes.data_max_kb);
    }
  }

  cfg.env.n_devices = cfg.n_devices;
  if (cfg.topology.kind == Topology::kEdgeCluster && cfg.topology.cluster_count == 0) {
    cfg.topology.cluster_count = cfg.env.n_edge_nodes;
  }

  const std::vector<std::string> range_errs = validate(cfg);
  errs.insert(errs.end(), range_errs.begin(), range_errs.end());
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError({"config: cannot open '" + path.string() + "'"});
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

}  // namespace edgeq
