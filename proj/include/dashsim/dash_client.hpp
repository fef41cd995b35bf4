#pragma once

#include <cstdint>
#include <vector>

#include "dashsim/appproto.hpp"
#include "dashsim/media_catalog.hpp"
#include "dashsim/netem.hpp"
#include "dashsim/sim_time.hpp"
#include "dashsim/stack.hpp"
#include "dashsim/transport.hpp"

namespace dashsim {

// Exponentially blended throughput estimate:
//   b_n = (w1 * b_prev + w2 * b_m) / (w1 + w2)
// With the default weights 0.7 / 1.3 this is b_n = 0.35 b_prev + 0.65 b_m.
struct EstimatorState {
  double w1 = 0.7;
  double w2 = 1.3;
  double b_prev_kbps = 0.0;
};

// Returns b_n and folds it back into the state (b_prev <- b_n).
double estimate_bandwidth(EstimatorState& state, double b_m_kbps);

// Highest-bitrate representation with bitrate <= safety_factor * b_n; falls
// back to the lowest one when nothing qualifies.
const Representation& select_representation(const MediaCatalog& catalog,
                                            double b_n_kbps,
                                            double safety_factor = 1.0);

// What b_m is measured from: segment media bytes (what a player sees) or
// client-received wire bytes during the fetch.
enum class ThroughputBasis { kMediaBytes, kWireBytes };

struct SegmentDownloadRecord {
  int segment_index = 0;
  int level = 0;
  double bitrate_kbps = 0.0;
  SimTime request_time = 0;
  SimTime first_byte_time = 0;
  SimTime completion_time = 0;
  std::int64_t media_bytes = 0;
  std::int64_t wire_bytes = 0;  // both directions while the fetch was active
  double measured_kbps = 0.0;   // b_m for this segment
  double estimate_kbps = 0.0;   // b_n after folding b_m in
  double available_kbps = 0.0;  // shaped rate at request time
};

struct SessionConfig {
  const MediaCatalog* catalog = nullptr;
  StackKind stack = StackKind::kHttp2Tcp;
  int rtt_ms = 0;
  double link_rate_kbps = 0.0;  // constant shaping unless trajectory set
  const BandwidthTrajectory* trajectory = nullptr;
  std::int64_t burst_bytes = 12'500;
  std::int64_t queue_capacity_bytes = 65'536;
  double initial_tokens = -1.0;  // <0: full bucket at t=0
  std::uint64_t seed = 1;
  int segment_count = -1;  // <0: the catalog's full count
  int fixed_level = -1;    // >=0: pin the level, adaptation off
  double safety_factor = 1.0;
  double w1 = 0.7;
  double w2 = 1.3;
  ThroughputBasis basis = ThroughputBasis::kMediaBytes;
  int pipeline_depth = 1;  // outstanding requests; 1 = strictly sequential
  // Server response scheduling: base think time plus seeded +/- jitter.
  SimTime server_think_base = from_millis(1);
  SimTime server_think_jitter = from_millis(1);
  std::uint64_t event_budget = EventQueue::kDefaultEventBudget;
  std::vector<PacketRecord>* packet_log = nullptr;
  std::vector<FrameRecord>* frame_log = nullptr;
};

struct ClientSession {
  StackKind stack = StackKind::kHttp2Tcp;
  int rtt_ms = 0;
  std::uint64_t seed = 0;
  std::vector<SegmentDownloadRecord> records;
  // Wire totals over the whole session, handshake and acks included.
  WireStats client_received;  // downlink as seen by the client
  WireStats client_sent;      // uplink offered by the client
  WireStats server_received;
  WireStats server_sent;
  std::int64_t downlink_drops = 0;
  std::int64_t uplink_drops = 0;
  std::int64_t total_media_bytes = 0;
  SimTime open_time = 0;  // connection open; session duration starts here
  SimTime end_time = 0;   // last response byte
  int connection_count = 1;

  SimTime active_duration() const { return end_time - open_time; }
};

// Runs one complete download session: open one persistent connection, fetch
// every segment, measure per-segment throughput, adapt (unless fixed_level).
ClientSession run_session(const SessionConfig& config);

}  // namespace dashsim
