#pragma once

#include <string>
#include <vector>

#include "dashsim/dash_client.hpp"

namespace dashsim {

// 1 - media bytes / total wire bytes received by the client. Headers,
// framing, handshake, acks and retransmissions all land in the denominator;
// uplink bytes do not (they are reported separately in the session).
double protocol_overhead(const ClientSession& session);

// (client-received wire bytes * 8 / active session duration) / available
// rate. The duration runs from connection open to the last response byte, so
// handshake round trips count against utilization; pass
// include_handshake=false to start the clock at the first request instead.
double link_utilization(const ClientSession& session, double available_kbps,
                        bool include_handshake = true);

// Total media bytes * 8 / active session duration, in kbps.
double avg_media_throughput_kbps(const ClientSession& session);

struct MetricsSummary {
  std::string scenario_id;
  int run_count = 0;
  double overhead = 0.0;
  double utilization = 0.0;
  double avg_media_throughput = 0.0;  // kbps
  std::vector<double> overhead_runs;
  std::vector<double> utilization_runs;
  std::vector<double> throughput_runs;
};

// Single-run summary; `available_kbps` <= 0 skips the utilization column.
MetricsSummary summarize(const std::string& scenario_id,
                         const ClientSession& session, double available_kbps);

// Arithmetic mean across runs of the same scenario. Per-run values are
// retained (concatenated in input order).
MetricsSummary aggregate(const std::vector<MetricsSummary>& runs);

}  // namespace dashsim
