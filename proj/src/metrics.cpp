#include "dashsim/metrics.hpp"

#include <numeric>
#include <stdexcept>

namespace dashsim {

double protocol_overhead(const ClientSession& session) {
  if (session.records.empty()) {
    throw std::invalid_argument("protocol_overhead: empty session trace");
  }
  const std::int64_t total = session.client_received.total_bytes;
  if (total <= 0) {
    throw std::invalid_argument("protocol_overhead: no bytes received");
  }
  return 1.0 - static_cast<double>(session.total_media_bytes) /
                   static_cast<double>(total);
}

double link_utilization(const ClientSession& session, double available_kbps,
                        bool include_handshake) {
  if (available_kbps <= 0) {
    throw std::invalid_argument("link_utilization: available rate must be > 0");
  }
  SimTime duration = session.active_duration();
  if (!include_handshake && !session.records.empty()) {
    duration = session.end_time - session.records.front().request_time;
  }
  if (duration <= 0) {
    throw std::invalid_argument("link_utilization: zero-duration trace");
  }
  const double throughput_kbps =
      static_cast<double>(session.client_received.total_bytes) * 8000.0 /
      static_cast<double>(duration);
  return throughput_kbps / available_kbps;
}

double avg_media_throughput_kbps(const ClientSession& session) {
  if (session.records.empty()) {
    throw std::invalid_argument("avg_media_throughput: empty session trace");
  }
  const SimTime duration = session.active_duration();
  if (duration <= 0) {
    throw std::invalid_argument("avg_media_throughput: zero-duration trace");
  }
  return static_cast<double>(session.total_media_bytes) * 8000.0 /
         static_cast<double>(duration);
}

MetricsSummary summarize(const std::string& scenario_id,
                         const ClientSession& session,
                         double available_kbps) {
  MetricsSummary s;
  s.scenario_id = scenario_id;
  s.run_count = 1;
  s.overhead = protocol_overhead(session);
  s.utilization =
      available_kbps > 0 ? link_utilization(session, available_kbps) : 0.0;
  s.avg_media_throughput = avg_media_throughput_kbps(session);
  s.overhead_runs = {s.overhead};
  s.utilization_runs = {s.utilization};
  s.throughput_runs = {s.avg_media_throughput};
  return s;
}

MetricsSummary aggregate(const std::vector<MetricsSummary>& runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  MetricsSummary out;
  out.scenario_id = runs.front().scenario_id;
  for (const MetricsSummary& r : runs) {
    if (r.scenario_id != out.scenario_id) {
      throw std::invalid_argument("aggregate: mixed scenario ids: '" +
                                  out.scenario_id + "' vs '" + r.scenario_id +
                                  "'");
    }
    out.run_count += r.run_count;
    out.overhead_runs.insert(out.overhead_runs.end(), r.overhead_runs.begin(),
                             r.overhead_runs.end());
    out.utilization_runs.insert(out.utilization_runs.end(),
                                r.utilization_runs.begin(),
                                r.utilization_runs.end());
    out.throughput_runs.insert(out.throughput_runs.end(),
                               r.throughput_runs.begin(),
                               r.throughput_runs.end());
  }
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? 0.0
                     : std::accumulate(v.begin(), v.end(), 0.0) /
                           static_cast<double>(v.size());
  };
  out.overhead = mean(out.overhead_runs);
  out.utilization = mean(out.utilization_runs);
  out.avg_media_throughput = mean(out.throughput_runs);
  return out;
}

}  // namespace dashsim
