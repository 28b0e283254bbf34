#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgeq/types.hpp"

namespace edgeq {

enum class LoadTier { kLow, kMedium, kHigh };

const char* to_string(LoadTier tier);
LoadTier load_tier_from_string(const std::string& s);

// Mean task arrivals per device per step for each tier.
struct TierRates {
  double low = 0.2;
  double medium = 0.5;
  double high = 0.9;

  double rate(LoadTier tier) const;
};

// Distribution bounds for generated task sizes.
struct TaskSizeModel {
  std::int64_t compute_min = 1;
  std::int64_t compute_max = 5;   // uniform integer units
  double data_min_kb = 10.0;
  double data_max_kb = 200.0;     // uniform KB
};

struct Trace {
  std::int64_t horizon_steps = 0;
  // tasks[d] is device d's arrival list, sorted by arrival_step ascending.
  std::vector<std::vector<Task>> tasks;

  std::size_t n_devices() const { return tasks.size(); }
  std::size_t total_tasks() const;
  bool operator==(const Trace&) const = default;
};

// Raised by load_trace with the offending line recorded.
class TraceError : public std::runtime_error {
 public:
  TraceError(std::string kind, int line, const std::string& detail)
      : std::runtime_error(kind + " at line " + std::to_string(line) + ": " +
                           detail),
        kind_(std::move(kind)),
        line_(line) {}

  const std::string& kind() const { return kind_; }
  int line() const { return line_; }

 private:
  std::string kind_;
  int line_;
};

// Per-device homogeneous Poisson arrivals at the given rate; task sizes drawn
// from `sizes`. Deterministic for a fixed seed.
Trace generate_trace_rate(std::size_t n_devices, double rate_per_step,
                          std::int64_t horizon_steps, std::uint64_t seed,
                          const TaskSizeModel& sizes = {});

Trace generate_trace(std::size_t n_devices, LoadTier tier,
                     std::int64_t horizon_steps, std::uint64_t seed,
                     const TierRates& rates = {},
                     const TaskSizeModel& sizes = {});

// CSV format: header row
//   device_id,task_id,arrival_step,compute_demand,data_size_kb,deadline_steps
// with LF line endings, no quoting, blank deadline for "none". The writer adds
// an optional "# horizon_steps=N" metadata line; without it the loader infers
// the horizon as the last arrival step + 1.
void write_trace(const Trace& trace, const std::filesystem::path& path);
Trace load_trace(const std::filesystem::path& path);

// Deterministic content hash over the canonical serialization, used to assert
// that paired runs consumed identical traces.
std::uint64_t trace_checksum(const Trace& trace);

}  // namespace edgeq
