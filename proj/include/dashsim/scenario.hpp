#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dashsim/dash_client.hpp"
#include "dashsim/media_catalog.hpp"
#include "dashsim/metrics.hpp"
#include "dashsim/netem.hpp"
#include "dashsim/stack.hpp"

namespace dashsim {

// Fixed-precision decimal formatting so CSV output is byte-identical across
// reruns.
std::string format_fixed(double value, int precision);

enum class Experiment { kOverhead, kUtilization, kAdaptation };

struct ScenarioSpec {
  Experiment experiment = Experiment::kOverhead;
  std::vector<StackKind> stacks{kAllStacks, kAllStacks + 4};
  std::vector<int> rtts_ms{0, 50, 150};
  std::vector<int> levels;  // empty: all catalog levels
  std::optional<MediaCatalog> catalog;            // default catalog if unset
  std::optional<BandwidthTrajectory> trajectory;  // default if unset
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::filesystem::path out_dir;  // empty: nothing written
  bool dump_packets = false;
  int session_seconds = 60;  // content per overhead/utilization cell
  int overhead_rtt_ms = 0;   // the sweep runs at a single RTT
  int threads = 0;           // 0: hardware concurrency
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  double value_at(std::size_t row, const std::string& column) const;
};

struct OverheadResult {
  ResultTable summary;  // one row per stack x level (5-seed mean)
  ResultTable runs;     // one row per stack x level x seed
};

struct UtilizationResult {
  ResultTable summary;  // one row per stack x rtt x level (5-seed mean)
  ResultTable runs;
  ResultTable averages;  // stack x rtt, averaged across levels
};

struct AdaptationResult {
  ResultTable summary;  // one row per stack x rtt (5-seed mean)
  ResultTable runs;
  // Per-segment traces land in out_dir as trace_<stack>_rtt<ms>_seed<k>.csv.
};

// Fig.-1-style sweep: fixed-level sessions with the link shaped to the
// level's bitrate; protocol overhead per stack x level.
OverheadResult run_overhead_sweep(const ScenarioSpec& spec);

// Table-1-style grid: utilization per stack x RTT x level, plus the per-stack
// per-RTT average across levels.
UtilizationResult run_utilization_grid(const ScenarioSpec& spec);

// Adaptive sessions against the bandwidth trajectory; average media
// throughput per stack x RTT and full per-segment traces.
AdaptationResult run_adaptation(const ScenarioSpec& spec);

// Analytic per-stack header accounting (the Table-2 check).
ResultTable analytic_overhead_table();

void write_session_trace(const ClientSession& session, std::ostream& out);

}  // namespace dashsim
