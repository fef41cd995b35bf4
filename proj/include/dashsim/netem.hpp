#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dashsim/sim_time.hpp"

namespace dashsim {

class TrajectoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrajectoryStep {
  SimTime start = 0;
  double rate_kbps = 0.0;

  bool operator==(const TrajectoryStep&) const = default;
};

// Piecewise-constant available bandwidth over time. Step starts are strictly
// increasing, the first one at t=0; the last step holds forever.
class BandwidthTrajectory {
 public:
  explicit BandwidthTrajectory(std::vector<TrajectoryStep> steps);

  const std::vector<TrajectoryStep>& steps() const { return steps_; }

  // Rate of the last step with start <= t.
  double rate_at(SimTime t) const;

  double min_rate_kbps() const;
  double max_rate_kbps() const;

  // Mean over [0, horizon), weighting each step by its duration.
  double time_weighted_mean_kbps(SimTime horizon) const;

  bool operator==(const BandwidthTrajectory&) const = default;

 private:
  std::vector<TrajectoryStep> steps_;
};

// 12 steps of 50 s over 600 s, every rate in [1000, 5000] kbps, time-weighted
// mean exactly 2700 kbps. Ships as data/default_trajectory.txt as well.
BandwidthTrajectory default_trajectory();

// Text format: `start_seconds rate_kbps` per line, '#' comments.
BandwidthTrajectory parse_trajectory(std::istream& in);
void write_trajectory(const BandwidthTrajectory& trajectory, std::ostream& out);
BandwidthTrajectory load_trajectory(const std::filesystem::path& path);
void save_trajectory(const BandwidthTrajectory& trajectory,
                     const std::filesystem::path& path);

// Byte-credit shaper: refills at the current rate, capped at `burst`.
struct TokenBucket {
  double rate_bytes_per_sec = 0.0;
  double burst_bytes = 0.0;
  double tokens = 0.0;  // starts full
  SimTime last_refill = 0;

  void refill(SimTime now);
};

struct LinkConfig {
  double rate_kbps = 0.0;  // used when no trajectory is attached
  std::optional<BandwidthTrajectory> trajectory;
  SimTime one_way_delay = 0;  // clamped to >= 1 us
  std::int64_t burst_bytes = 12'500;
  std::int64_t queue_capacity_bytes = 65'536;
  double initial_tokens = -1.0;  // <0: bucket starts full
};

// One direction of the emulated path: token-bucket shaping, then fixed
// propagation delay. Finite drop-tail backlog measured in bytes.
class EmulatedLink {
 public:
  struct Transmit {
    bool dropped = false;
    SimTime arrival = 0;  // meaningful only when !dropped
  };

  explicit EmulatedLink(LinkConfig config);

  // Admits `packet_bytes` at `now`. The shaper serializes FIFO at the current
  // rate; delay is added after shaping. DROP is a modeled outcome (queue
  // overflow or forced), not an error.
  Transmit transmit(std::int64_t packet_bytes, SimTime now);

  double rate_kbps_at(SimTime t) const;
  SimTime one_way_delay() const { return one_way_delay_; }
  std::int64_t queue_capacity_bytes() const { return queue_capacity_; }
  std::int64_t queued_bytes(SimTime now);

  std::int64_t drop_count() const { return drop_count_; }
  std::int64_t dropped_bytes() const { return dropped_bytes_; }
  std::int64_t delivered_packets() const { return delivered_packets_; }
  std::int64_t delivered_bytes() const { return delivered_bytes_; }

  // Deterministic loss injection for tests: called with the 0-based index of
  // each would-be transmission; returning true discards the packet.
  void set_forced_drop(std::function<bool(std::uint64_t packet_index)> fn) {
    forced_drop_ = std::move(fn);
  }

 private:
  void drain(SimTime now);

  BandwidthTrajectory trajectory_;
  SimTime one_way_delay_;
  std::int64_t queue_capacity_;
  TokenBucket bucket_;
  std::deque<std::pair<SimTime, std::int64_t>> backlog_;  // (departure, bytes)
  std::int64_t backlog_bytes_ = 0;
  SimTime last_departure_ = 0;
  std::int64_t drop_count_ = 0;
  std::int64_t dropped_bytes_ = 0;
  std::int64_t delivered_packets_ = 0;
  std::int64_t delivered_bytes_ = 0;
  std::uint64_t transmit_index_ = 0;
  std::function<bool(std::uint64_t)> forced_drop_;
};

}  // namespace dashsim
