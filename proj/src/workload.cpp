#include "edgeq/workload.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <optional>
#include <unordered_set>

#include "edgeq/rng.hpp"

namespace edgeq {

namespace {

constexpr const char* kTraceHeader =
    "device_id,task_id,arrival_step,compute_demand,data_size_kb,deadline_steps";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::int64_t parse_int(const std::string& field, int line_no, const char* what) {
  std::int64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw TraceError("bad-integer", line_no,
                     fmt::format("{} is not an integer: '{}'", what, field));
  }
  return value;
}

double parse_double(const std::string& field, int line_no, const char* what) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw TraceError("bad-number", line_no,
                     fmt::format("{} is not a number: '{}'", what, field));
  }
  return value;
}

void check_sizes(const TaskSizeModel& sizes) {
  if (sizes.compute_min < 1 || sizes.compute_max < sizes.compute_min) {
    throw std::invalid_argument("task size model: need 1 <= compute_min <= compute_max");
  }
  if (sizes.data_min_kb < 0.0 || sizes.data_max_kb < sizes.data_min_kb) {
    throw std::invalid_argument("task size model: need 0 <= data_min_kb <= data_max_kb");
  }
}

}  // namespace

const char* to_string(LoadTier tier) {
  switch (tier) {
    case LoadTier::kLow: return "low";
    case LoadTier::kMedium: return "medium";
    case LoadTier::kHigh: return "high";
  }
  throw std::logic_error("unreachable load tier");
}

LoadTier load_tier_from_string(const std::string& s) {
  if (s == "low") return LoadTier::kLow;
  if (s == "medium") return LoadTier::kMedium;
  if (s == "high") return LoadTier::kHigh;
  throw std::invalid_argument("unknown load tier: '" + s + "' (expected low|medium|high)");
}

double TierRates::rate(LoadTier tier) const {
  switch (tier) {
    case LoadTier::kLow: return low;
    case LoadTier::kMedium: return medium;
    case LoadTier::kHigh: return high;
  }
  throw std::logic_error("unreachable load tier");
}

std::size_t Trace::total_tasks() const {
  std::size_t n = 0;
  for (const auto& list : tasks) n += list.size();
  return n;
}

Trace generate_trace_rate(std::size_t n_devices, double rate_per_step,
                          std::int64_t horizon_steps, std::uint64_t seed,
                          const TaskSizeModel& sizes) {
  if (n_devices == 0) throw std::invalid_argument("generate_trace: n_devices must be >= 1");
  if (horizon_steps < 1) throw std::invalid_argument("generate_trace: horizon must be >= 1");
  if (!(rate_per_step >= 0.0) || rate_per_step > 100.0) {
    throw std::invalid_argument("generate_trace: rate must be in [0, 100]");
  }
  check_sizes(sizes);

  Trace trace;
  trace.horizon_steps = horizon_steps;
  trace.tasks.resize(n_devices);
  std::int64_t next_id = 0;
  for (std::size_t d = 0; d < n_devices; ++d) {
    Rng rng(derive_seed(seed, d));
    auto& list = trace.tasks[d];
    for (std::int64_t t = 0; t < horizon_steps; ++t) {
      const int k = rng.poisson(rate_per_step);
      for (int j = 0; j < k; ++j) {
        Task task;
        task.id = next_id++;
        task.arrival_step = t;
        task.compute_demand =
            static_cast<double>(rng.uniform_int(sizes.compute_min, sizes.compute_max));
        task.data_size_kb = rng.uniform(sizes.data_min_kb, sizes.data_max_kb);
        list.push_back(task);
      }
    }
  }
  return trace;
}

Trace generate_trace(std::size_t n_devices, LoadTier tier, std::int64_t horizon_steps,
                     std::uint64_t seed, const TierRates& rates,
                     const TaskSizeModel& sizes) {
  return generate_trace_rate(n_devices, rates.rate(tier), horizon_steps, seed, sizes);
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("write_trace: cannot open '" + path.string() + "' for writing");
  }
  out << kTraceHeader << '\n';
  out << fmt::format("# horizon_steps={}\n", trace.horizon_steps);
  for (std::size_t d = 0; d < trace.tasks.size(); ++d) {
    for (const Task& task : trace.tasks[d]) {
      out << fmt::format("{},{},{},{},{},{}\n", d, task.id, task.arrival_step,
                         task.compute_demand, task.data_size_kb,
                         task.deadline_steps ? fmt::format("{}", *task.deadline_steps)
                                             : std::string());
    }
  }
  if (!out) {
    throw std::runtime_error("write_trace: write to '" + path.string() + "' failed");
  }
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TraceError("missing-file", 0, "cannot open '" + path.string() + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw TraceError("bad-header", 1, "empty file, expected header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) {
    throw TraceError("bad-header", 1,
                     fmt::format("expected '{}', got '{}'", kTraceHeader, line));
  }

  Trace trace;
  std::unordered_set<std::int64_t> seen_ids;
  std::int64_t max_arrival = -1;
  std::optional<std::int64_t> declared_horizon;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;  // tolerate a trailing blank line
    if (line[0] == '#') {
      // Optional metadata, currently only "# horizon_steps=N".
      constexpr const char* kKey = "# horizon_steps=";
      if (line.rfind(kKey, 0) == 0) {
        declared_horizon = parse_int(line.substr(std::string(kKey).size()), line_no,
                                     "horizon_steps");
      }
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 6) {
      throw TraceError("bad-field-count", line_no,
                       fmt::format("expected 6 fields, got {}", fields.size()));
    }
    const std::int64_t device = parse_int(fields[0], line_no, "device_id");
    if (device < 0) {
      throw TraceError("bad-device", line_no, "device_id must be >= 0");
    }
    Task task;
    task.id = parse_int(fields[1], line_no, "task_id");
    task.arrival_step = parse_int(fields[2], line_no, "arrival_step");
    if (task.arrival_step < 0) {
      throw TraceError("bad-arrival", line_no, "arrival_step must be >= 0");
    }
    task.compute_demand = parse_double(fields[3], line_no, "compute_demand");
    if (!(task.compute_demand > 0.0)) {
      throw TraceError("bad-compute", line_no, "compute_demand must be > 0");
    }
    task.data_size_kb = parse_double(fields[4], line_no, "data_size_kb");
    if (!(task.data_size_kb >= 0.0)) {
      throw TraceError("bad-data-size", line_no, "data_size_kb must be >= 0");
    }
    if (!fields[5].empty()) {
      const std::int64_t deadline = parse_int(fields[5], line_no, "deadline_steps");
      if (deadline < 0) {
        throw TraceError("bad-deadline", line_no, "deadline_steps must be >= 0");
      }
      task.deadline_steps = deadline;
    }
    if (!seen_ids.insert(task.id).second) {
      throw TraceError("duplicate-id", line_no,
                       fmt::format("task id {} already used", task.id));
    }
    const auto d = static_cast<std::size_t>(device);
    if (trace.tasks.size() <= d) trace.tasks.resize(d + 1);
    if (!trace.tasks[d].empty() && trace.tasks[d].back().arrival_step > task.arrival_step) {
      throw TraceError("unsorted-arrivals", line_no,
                       fmt::format("arrival_step {} precedes previous {} for device {}",
                                   task.arrival_step, trace.tasks[d].back().arrival_step,
                                   device));
    }
    trace.tasks[d].push_back(task);
    max_arrival = std::max(max_arrival, task.arrival_step);
  }
  if (declared_horizon) {
    if (*declared_horizon < max_arrival + 1) {
      throw TraceError("bad-horizon", line_no,
                       fmt::format("declared horizon {} is below last arrival step {}",
                                   *declared_horizon, max_arrival));
    }
    trace.horizon_steps = *declared_horizon;
  } else {
    trace.horizon_steps = max_arrival + 1;
  }
  return trace;
}

std::uint64_t trace_checksum(const Trace& trace) {
  // FNV-1a over a canonical serialization of every field.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(trace.horizon_steps));
  mix(trace.tasks.size());
  for (const auto& list : trace.tasks) {
    mix(list.size());
    for (const Task& t : list) {
      mix(static_cast<std::uint64_t>(t.id));
      mix(static_cast<std::uint64_t>(t.arrival_step));
      mix(std::bit_cast<std::uint64_t>(t.compute_demand));
      mix(std::bit_cast<std::uint64_t>(t.data_size_kb));
      mix(t.deadline_steps ? 1u : 0u);
      if (t.deadline_steps) mix(static_cast<std::uint64_t>(*t.deadline_steps));
    }
  }
  return h;
}

}  // namespace edgeq
