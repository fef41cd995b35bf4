#include "dashsim/dash_client.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "dashsim/event_queue.hpp"
#include "dashsim/rng.hpp"

namespace dashsim {

double estimate_bandwidth(EstimatorState& state, double b_m_kbps) {
  if (b_m_kbps < 0) throw std::invalid_argument("negative throughput sample");
  const double b_n =
      (state.w1 * state.b_prev_kbps + state.w2 * b_m_kbps) /
      (state.w1 + state.w2);
  state.b_prev_kbps = b_n;
  return b_n;
}

const Representation& select_representation(const MediaCatalog& catalog,
                                            double b_n_kbps,
                                            double safety_factor) {
  const auto& ladder = catalog.representations();
  const double budget = safety_factor * b_n_kbps;
  const Representation* best = nullptr;
  for (const Representation& r : ladder) {
    if (r.bitrate_kbps <= budget) best = &r;
  }
  return best ? *best : ladder.front();
}

namespace {

// Per-stream FIFO of expected messages. Stream delivery is in order, so
// message boundaries fall out of cumulative byte counts.
class MessageRouter {
 public:
  struct Expected {
    std::int64_t remaining = 0;
    bool started = false;
    std::function<void(SimTime)> on_first_byte;
    std::function<void(SimTime)> on_complete;
  };

  void expect(Side at, StreamId stream, std::int64_t stream_bytes,
              std::function<void(SimTime)> on_first_byte,
              std::function<void(SimTime)> on_complete) {
    inbox_[key(at, stream)].push_back(Expected{
        stream_bytes, false, std::move(on_first_byte), std::move(on_complete)});
  }

  void on_data(Side at, StreamId stream, std::int64_t length, SimTime now) {
    auto it = inbox_.find(key(at, stream));
    if (it == inbox_.end()) {
      throw std::logic_error("stream data with no expected message");
    }
    auto& fifo = it->second;
    while (length > 0) {
      if (fifo.empty()) throw std::logic_error("more stream data than expected");
      Expected& head = fifo.front();
      if (!head.started) {
        head.started = true;
        if (head.on_first_byte) head.on_first_byte(now);
      }
      const std::int64_t take = std::min(length, head.remaining);
      head.remaining -= take;
      length -= take;
      if (head.remaining == 0) {
        auto complete = std::move(head.on_complete);
        fifo.pop_front();
        if (complete) complete(now);
      }
    }
  }

 private:
  static std::uint64_t key(Side at, StreamId stream) {
    return (static_cast<std::uint64_t>(at == Side::kServer) << 32) | stream;
  }
  std::map<std::uint64_t, std::deque<Expected>> inbox_;
};

}  // namespace

ClientSession run_session(const SessionConfig& config) {
  if (!config.catalog) throw std::invalid_argument("session needs a catalog");
  const MediaCatalog& catalog = *config.catalog;
  if (config.fixed_level >= catalog.level_count()) {
    throw std::out_of_range("fixed level out of catalog range");
  }
  const int segment_count =
      config.segment_count < 0
          ? catalog.segment_count()
          : std::min(config.segment_count, catalog.segment_count());
  if (segment_count < 1) throw std::invalid_argument("no segments to fetch");
  const int depth = std::clamp(config.pipeline_depth, 1, 8);

  EventQueue queue;
  SeededRng rng(config.seed);

  const SimTime one_way = from_millis(config.rtt_ms) / 2;
  auto make_link = [&] {
    LinkConfig lc;
    lc.rate_kbps = config.link_rate_kbps;
    if (config.trajectory) lc.trajectory = *config.trajectory;
    lc.one_way_delay = one_way;
    lc.burst_bytes = config.burst_bytes;
    lc.queue_capacity_bytes = config.queue_capacity_bytes;
    lc.initial_tokens = config.initial_tokens;
    return EmulatedLink(lc);
  };
  // Shaping applies in both directions with independent buckets.
  EmulatedLink down = make_link();
  EmulatedLink up = make_link();

  TransportConfig tconfig;
  tconfig.stack = StackConfig::make(config.stack);
  tconfig.nominal_rtt = std::max<SimTime>(from_millis(config.rtt_ms), 2);
  Connection conn(tconfig, queue, down, up);
  conn.set_packet_log(config.packet_log);

  AppFraming framing(config.stack);
  StreamIdAllocator h2_streams(true);  // logical ids for the frame log
  MessageRouter router;

  ClientSession session;
  session.stack = config.stack;
  session.rtt_ms = config.rtt_ms;
  session.seed = config.seed;
  session.records.resize(static_cast<std::size_t>(segment_count));

  EstimatorState estimator{config.w1, config.w2, 0.0};
  bool estimator_primed = false;
  double current_estimate = 0.0;
  int next_to_request = 0;
  int outstanding = 0;
  int completed = 0;

  conn.set_on_data([&](Side at, StreamId stream, std::uint64_t /*offset*/,
                       std::int64_t length, SimTime at_time) {
    router.on_data(at, stream, length, at_time);
  });

  // Wire bytes seen by the client in both directions, for per-segment deltas.
  auto client_wire_total = [&]() {
    return conn.received(Side::kClient).total_bytes +
           conn.sent(Side::kClient).total_bytes;
  };

  std::function<void()> maybe_fetch;

  auto complete_segment = [&](int segment, std::int64_t wire_before,
                              SimTime completion) {
    SegmentDownloadRecord& rec =
        session.records[static_cast<std::size_t>(segment)];
    rec.completion_time = completion;
    rec.wire_bytes = client_wire_total() - wire_before;
    const SimTime elapsed = std::max<SimTime>(
        completion - rec.request_time, 1);
    std::int64_t measured_bytes = rec.media_bytes;
    if (config.basis == ThroughputBasis::kWireBytes) {
      measured_bytes = rec.wire_bytes;
    }
    rec.measured_kbps =
        static_cast<double>(measured_bytes) * 8000.0 / static_cast<double>(elapsed);
    if (!estimator_primed) {
      estimator.b_prev_kbps = rec.measured_kbps;
      estimator_primed = true;
      current_estimate = rec.measured_kbps;
    } else {
      current_estimate = estimate_bandwidth(estimator, rec.measured_kbps);
    }
    rec.estimate_kbps = current_estimate;
    session.total_media_bytes += rec.media_bytes;
    ++completed;
    --outstanding;
    if (completed == segment_count) {
      session.end_time = completion;
    } else {
      maybe_fetch();
    }
  };

  auto fetch = [&](int segment) {
    const SimTime now = queue.now();
    int level;
    if (config.fixed_level >= 0) {
      level = config.fixed_level;
    } else if (!estimator_primed) {
      level = 0;  // conservative bootstrap at the lowest representation
    } else {
      level = select_representation(catalog, current_estimate,
                                    config.safety_factor)
                  .level;
    }

    SegmentDownloadRecord& rec =
        session.records[static_cast<std::size_t>(segment)];
    rec.segment_index = segment;
    rec.level = level;
    rec.bitrate_kbps = catalog.representation(level).bitrate_kbps;
    rec.request_time = now;
    rec.media_bytes = catalog.segment_bytes(level, segment);
    rec.available_kbps = down.rate_kbps_at(now);
    const std::int64_t wire_before = client_wire_total();

    const std::string path = catalog.url_path(level, segment);
    const RequestEncoding request = framing.encode_request(path);
    const ResponseEncoding response = framing.encode_response(rec.media_bytes);
    const std::int64_t request_stream_bytes =
        with_ssl_records(tconfig, request.payload_bytes);
    const std::int64_t response_stream_bytes =
        with_ssl_records(tconfig, response.payload_bytes);

    const StreamId stream = conn.open_client_stream();
    if (config.frame_log) {
      const StreamId logical = tconfig.stack.quic ? stream : h2_streams.next();
      const bool framed = config.stack == StackKind::kHttp2Tcp ||
                          config.stack == StackKind::kHttp2Ssl;
      config.frame_log->push_back(
          FrameRecord{now, logical, framed ? 'H' : 'R', request.payload_bytes});
    }

    // Server side: respond after the request fully arrives, plus think time.
    router.expect(
        Side::kServer, stream, request_stream_bytes, {},
        [&, stream, response_stream_bytes, response,
         segment](SimTime got_request) {
          const SimTime jitter =
              config.server_think_jitter > 0
                  ? rng.uniform_int(-config.server_think_jitter,
                                    config.server_think_jitter)
                  : 0;
          const SimTime think =
              std::max<SimTime>(0, config.server_think_base + jitter);
          queue.schedule(got_request + think, [&, stream,
                                               response_stream_bytes, response,
                                               segment] {
            if (config.frame_log) {
              const bool framed = config.stack == StackKind::kHttp2Tcp ||
                                  config.stack == StackKind::kHttp2Ssl;
              if (framed) {
                config.frame_log->push_back(FrameRecord{
                    queue.now(), 0, 'H',
                    kFrameHeaderBytes + response.header_block_bytes});
                std::int64_t body = response.body_bytes;
                do {
                  const std::int64_t take =
                      std::min(body, kMaxFramePayloadBytes);
                  config.frame_log->push_back(FrameRecord{
                      queue.now(), 0, 'D', kFrameHeaderBytes + take});
                  body -= take;
                } while (body > 0);
              } else {
                config.frame_log->push_back(FrameRecord{
                    queue.now(), stream, 'R', response.payload_bytes});
              }
            }
            conn.send(Side::kServer, stream, response_stream_bytes,
                      queue.now());
          });
        });

    // Client side: completion drives measurement and the next fetch.
    router.expect(
        Side::kClient, stream, response_stream_bytes,
        [&, segment](SimTime first_byte) {
          session.records[static_cast<std::size_t>(segment)].first_byte_time =
              first_byte;
        },
        [&, segment, wire_before](SimTime completion) {
          complete_segment(segment, wire_before, completion);
        });

    conn.send(Side::kClient, stream, request_stream_bytes, now);
  };

  maybe_fetch = [&] {
    while (next_to_request < segment_count && outstanding < depth) {
      ++outstanding;
      fetch(next_to_request++);
    }
  };

  conn.set_on_ready([&](SimTime) { maybe_fetch(); });
  session.open_time = 0;
  conn.open(0);
  queue.run_until_idle(config.event_budget);

  if (completed != segment_count) {
    throw std::runtime_error("session ended with unfinished segments");
  }
  session.client_received = conn.received(Side::kClient);
  session.client_sent = conn.sent(Side::kClient);
  session.server_received = conn.received(Side::kServer);
  session.server_sent = conn.sent(Side::kServer);
  session.downlink_drops = down.drop_count();
  session.uplink_drops = up.drop_count();
  session.connection_count = conn.connection_count();
  return session;
}

}  // namespace dashsim
