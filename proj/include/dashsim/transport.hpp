#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "dashsim/event_queue.hpp"
#include "dashsim/netem.hpp"
#include "dashsim/sim_time.hpp"
#include "dashsim/stack.hpp"

namespace dashsim {

using StreamId = std::uint32_t;

enum class Side { kClient, kServer };

constexpr Side peer(Side s) {
  return s == Side::kClient ? Side::kServer : Side::kClient;
}

// Slow-start / AIMD window in payload bytes. Doubles as the CUBIC-mimic used
// by the QUIC model; both transports run it at the same fidelity.
struct CongestionControl {
  std::int64_t mss = 0;
  std::int64_t cwnd = 0;
  std::int64_t ssthresh = 64 * 1024;

  explicit CongestionControl(std::int64_t mss_bytes)
      : mss(mss_bytes), cwnd(10 * mss_bytes) {}

  void on_ack(std::int64_t acked_bytes) {
    if (cwnd < ssthresh) {
      cwnd += acked_bytes;  // slow start
    } else {
      cwnd += std::max<std::int64_t>(1, mss * mss / cwnd);
    }
  }

  void on_loss() {
    ssthresh = std::max(cwnd / 2, 2 * mss);
    cwnd = ssthresh;
  }
};

// Byte counters for one direction, split by what the bytes are. `stream`
// covers application payload on data packets, retransmissions included;
// `payload_framing` covers in-payload transport framing (QUIC stream-frame
// headers and auth tags); `handshake_bytes` is handshake payload. Headers of
// every packet land in `header_bytes`, so
//   total_bytes == header_bytes + stream_bytes + payload_framing_bytes
//                  + handshake_bytes.
// ack_bytes / retransmit_bytes are whole-packet tallies of those subsets.
struct WireStats {
  std::int64_t packets = 0;
  std::int64_t total_bytes = 0;
  std::int64_t header_bytes = 0;
  std::int64_t payload_framing_bytes = 0;
  std::int64_t stream_bytes = 0;
  std::int64_t ack_packets = 0;
  std::int64_t ack_bytes = 0;
  std::int64_t handshake_packets = 0;
  std::int64_t handshake_bytes = 0;
  std::int64_t retransmit_packets = 0;
  std::int64_t retransmit_bytes = 0;
};

// One row of the --dump-packets CSV.
struct PacketRecord {
  SimTime time = 0;
  Side from = Side::kClient;
  std::int64_t header_bytes = 0;
  std::int64_t payload_bytes = 0;
  StreamId stream = 0;
  std::uint64_t seq = 0;
  bool ack = false;
  bool handshake = false;
  bool retransmit = false;
  bool dropped = false;
};

struct TransportConfig {
  StackConfig stack;
  QuicHeaderMode quic_header_mode = QuicHeaderMode::kDefault;
  // In-payload bytes per QUIC data packet: stream-frame header and the
  // per-packet authentication tag (QUIC carries SSL-grade crypto).
  int quic_stream_frame_bytes = 8;
  int quic_auth_tag_bytes = 12;
  // SSL record layer: extra bytes per record of at most 16 KiB payload.
  int ssl_record_bytes = 29;
  int ssl_record_payload_max = 16 * 1024;
  // TLS handshake flights after the TCP handshake: client hello, server
  // hello + certificate, client key exchange + finished, server finished.
  std::array<int, 4> ssl_handshake_flight_bytes = {200, 3000, 300, 100};
  SimTime min_rto = from_millis(200);
  SimTime nominal_rtt = 0;  // floor for the RTO, see design notes
};

// A single persistent connection between client and server, simulated at
// packet granularity on the event queue. Both transports provide reliable
// in-order delivery per stream; the QUIC model keeps streams independent
// (a loss on one stream never delays data already arrived on another),
// while the TCP model is one byte stream and therefore blocks on any hole.
//
// Payload content is modeled as byte counts; delivery callbacks report
// contiguous (stream, offset, length) progress in order, which is equivalent
// to delivering the byte sequence itself.
class Connection {
 public:
  using DataHandler = std::function<void(Side receiver, StreamId stream,
                                         std::uint64_t offset,
                                         std::int64_t length, SimTime at)>;
  using ReadyHandler = std::function<void(SimTime ready_at)>;

  // `down` carries server->client packets, `up` client->server.
  Connection(const TransportConfig& config, EventQueue& queue,
             EmulatedLink& down, EmulatedLink& up);

  const TransportConfig& config() const { return config_; }

  // Starts the handshake. The ready handler fires when application data may
  // flow: immediately for QUIC (zero-RTT), after 1 RTT for TCP and 3 RTTs
  // for SSL-over-TCP.
  void open(SimTime now);
  bool is_ready() const { return ready_; }
  SimTime ready_time() const;

  void set_on_ready(ReadyHandler handler) { on_ready_ = std::move(handler); }
  void set_on_data(DataHandler handler) { on_data_ = std::move(handler); }
  void set_packet_log(std::vector<PacketRecord>* log) { packet_log_ = log; }

  // Client-initiated stream ids: odd, strictly increasing. TCP stacks carry
  // everything on the single byte stream 0.
  StreamId open_client_stream();

  // Queues `app_bytes` of payload on `stream`. For TCP stacks the stream must
  // be 0; for QUIC it must have been opened. Transmission proceeds as the
  // congestion window allows.
  void send(Side from, StreamId stream, std::int64_t app_bytes, SimTime now);

  // Application payload capacity of a full packet (MTU minus headers):
  // 1448 for the TCP path, 1186 for the QUIC path.
  std::int64_t mss_payload() const { return mss_payload_; }
  // Stream bytes that fit in one packet after in-payload framing.
  std::int64_t mss_stream() const { return mss_stream_; }

  const CongestionControl& congestion(Side side) const {
    return sender(side).cc;
  }

  // Bytes put on the wire by `from` (including drops at the shaper).
  const WireStats& sent(Side from) const { return sent_[index(from)]; }
  // Bytes that actually arrived at `at`.
  const WireStats& received(Side at) const { return received_[index(at)]; }

  int connection_count() const { return 1; }

 private:
  struct Chunk {
    StreamId stream = 0;
    std::uint64_t offset = 0;
    std::int64_t length = 0;
  };

  struct Packet {
    std::uint64_t seq = 0;
    Chunk chunk;
    std::int64_t header_bytes = 0;
    std::int64_t framing_bytes = 0;
    bool ack = false;
    bool handshake = false;
    bool retransmit = false;
    std::uint64_t ack_upto = 0;
    std::int64_t payload_bytes() const {
      return chunk.length + framing_bytes;
    }
    std::int64_t total_bytes() const {
      return header_bytes + payload_bytes();
    }
  };

  struct SentRecord {
    Chunk chunk;
    SimTime last_sent = 0;
    bool retransmitted = false;
  };

  struct Sender {
    std::deque<Chunk> queue;
    CongestionControl cc{1};
    std::int64_t in_flight = 0;
    std::uint64_t next_seq = 0;
    std::map<std::uint64_t, SentRecord> unacked;
    std::uint64_t ack_upto = 0;
    int dup_acks = 0;
    bool in_recovery = false;
    std::uint64_t recovery_until = 0;
    bool rto_armed = false;
    EventId rto_event = 0;
    int rto_backoff = 0;
    SimTime srtt = 0;
    SimTime rttvar = 0;
    bool have_rtt = false;
    bool sent_any = false;
    std::map<StreamId, std::uint64_t> next_offset;
  };

  struct StreamRecv {
    std::uint64_t delivered = 0;
    std::map<std::uint64_t, std::uint64_t> pending;  // offset -> end
  };

  struct Receiver {
    std::uint64_t contiguous_seq = 0;
    std::set<std::uint64_t> out_of_order;
    std::map<StreamId, StreamRecv> streams;
  };

  static std::size_t index(Side s) { return s == Side::kClient ? 0 : 1; }
  Sender& sender(Side s) { return senders_[index(s)]; }
  const Sender& sender(Side s) const { return senders_[index(s)]; }
  Receiver& receiver(Side s) { return receivers_[index(s)]; }
  EmulatedLink& link_from(Side s) {
    return s == Side::kServer ? down_ : up_;
  }

  int data_header_bytes(Side from);
  void pump(Side from, SimTime now);
  void transmit_data(Side from, std::uint64_t seq, const Chunk& chunk,
                     bool retransmit, SimTime now);
  void send_ack(Side from, SimTime now);
  void send_handshake_packet(Side from, std::int64_t payload_bytes,
                             bool last_of_flight, int flight, SimTime now);
  void start_ssl_flight(int flight, SimTime now);
  void on_packet(Side at, Packet pkt, SimTime now);
  void on_data_packet(Side at, const Packet& pkt, SimTime now);
  void on_ack_packet(Side at, const Packet& pkt, SimTime now);
  void on_handshake_packet(Side at, const Packet& pkt, SimTime now);
  void retransmit_earliest(Side from, SimTime now);
  void arm_rto(Side from, SimTime now);
  void on_rto(Side from, SimTime now);
  void account_sent(Side from, const Packet& pkt, bool dropped, SimTime now);
  void account_received(Side at, const Packet& pkt);
  void become_ready(SimTime now);

  TransportConfig config_;
  EventQueue& queue_;
  EmulatedLink& down_;
  EmulatedLink& up_;
  std::int64_t mss_payload_ = 0;
  std::int64_t mss_stream_ = 0;
  int per_packet_framing_ = 0;

  bool opened_ = false;
  bool ready_ = false;
  SimTime open_time_ = 0;
  SimTime ready_time_ = 0;
  int ssl_flights_done_ = 0;
  int handshake_packets_pending_ = 0;

  StreamId next_client_stream_ = 1;
  std::set<StreamId> known_streams_;

  std::array<Sender, 2> senders_;
  std::array<Receiver, 2> receivers_;
  std::array<WireStats, 2> sent_;
  std::array<WireStats, 2> received_;

  ReadyHandler on_ready_;
  DataHandler on_data_;
  std::vector<PacketRecord>* packet_log_ = nullptr;
};

}  // namespace dashsim
