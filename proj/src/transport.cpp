#include "dashsim/transport.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>

namespace dashsim {

namespace {

constexpr std::uint64_t kMaxStreamId = 1u << 31;

}  // namespace

Connection::Connection(const TransportConfig& config, EventQueue& queue,
                       EmulatedLink& down, EmulatedLink& up)
    : config_(config), queue_(queue), down_(down), up_(up) {
  const StackConfig& stack = config_.stack;
  if (stack.quic) {
    per_packet_framing_ =
        config_.quic_stream_frame_bytes + config_.quic_auth_tag_bytes;
    mss_payload_ = stack.mtu_bytes - stack.base_header_bytes() -
                   quic_header_len(config_.quic_header_mode, {});
  } else {
    per_packet_framing_ = 0;
    mss_payload_ = stack.mtu_bytes - stack.base_header_bytes();
  }
  mss_stream_ = mss_payload_ - per_packet_framing_;
  for (Sender& s : senders_) {
    s.cc = CongestionControl(mss_payload_);
  }
  if (!stack.quic) known_streams_.insert(0);
}

SimTime Connection::ready_time() const {
  if (!ready_) throw std::logic_error("connection not ready yet");
  return ready_time_;
}

StreamId Connection::open_client_stream() {
  if (!config_.stack.quic) return 0;  // single transport byte stream
  if (next_client_stream_ >= kMaxStreamId) {
    throw std::runtime_error("stream id space exhausted");
  }
  const StreamId id = next_client_stream_;
  next_client_stream_ += 2;
  known_streams_.insert(id);
  return id;
}

int Connection::data_header_bytes(Side from) {
  const StackConfig& stack = config_.stack;
  if (!stack.quic) return stack.base_header_bytes();
  // Version bytes ride only on the client's first data packet.
  const bool first = from == Side::kClient && !sender(from).sent_any;
  return stack.base_header_bytes() +
         quic_header_len(config_.quic_header_mode, {first});
}

void Connection::open(SimTime now) {
  if (opened_) throw std::logic_error("connection already opened");
  opened_ = true;
  open_time_ = now;
  if (config_.stack.quic) {
    // Speculative zero-RTT: a min-packet each way, concurrent with data.
    send_handshake_packet(Side::kClient, 0, true, 0, now);
    queue_.schedule(now, [this] { become_ready(queue_.now()); });
  } else {
    // SYN; the server answers with SYN-ACK.
    send_handshake_packet(Side::kClient, 0, true, 0, now);
  }
}

void Connection::become_ready(SimTime now) {
  if (ready_) return;
  ready_ = true;
  ready_time_ = now;
  if (on_ready_) on_ready_(now);
  pump(Side::kClient, now);
  pump(Side::kServer, now);
}

void Connection::send_handshake_packet(Side from, std::int64_t payload_bytes,
                                       bool last_of_flight, int flight,
                                       SimTime now) {
  Packet pkt;
  pkt.handshake = true;
  pkt.ack_upto = static_cast<std::uint64_t>(flight);  // flight tag
  pkt.chunk.length = payload_bytes;
  pkt.chunk.stream = last_of_flight ? 1 : 0;          // last-of-flight tag
  if (config_.stack.quic) {
    pkt.header_bytes = config_.stack.base_header_bytes() +
                       quic_header_len(QuicHeaderMode::kMinimal);
  } else {
    pkt.header_bytes = config_.stack.base_header_bytes();
  }
  const auto result = link_from(from).transmit(pkt.total_bytes(), now);
  account_sent(from, pkt, result.dropped, now);
  if (result.dropped) return;
  const Side to = peer(from);
  queue_.schedule(result.arrival, [this, to, pkt] {
    on_packet(to, pkt, queue_.now());
  });
}

void Connection::start_ssl_flight(int flight, SimTime now) {
  // Flights 2..5; even flights go client->server.
  const Side from = (flight % 2 == 0) ? Side::kClient : Side::kServer;
  std::int64_t remaining = config_.ssl_handshake_flight_bytes[flight - 2];
  if (remaining <= 0) remaining = 1;
  while (remaining > 0) {
    const std::int64_t take = std::min<std::int64_t>(remaining, mss_payload_);
    remaining -= take;
    send_handshake_packet(from, take, remaining == 0, flight, now);
  }
}

void Connection::on_handshake_packet(Side at, const Packet& pkt, SimTime now) {
  const int flight = static_cast<int>(pkt.ack_upto);
  const bool last_of_flight = pkt.chunk.stream == 1;
  if (!last_of_flight) return;
  if (config_.stack.quic) {
    // Server answers the client's hello; nothing further gates readiness.
    if (at == Side::kServer) {
      send_handshake_packet(Side::kServer, 0, true, 1, now);
    }
    return;
  }
  const bool ssl = config_.stack.kind == StackKind::kHttp2Ssl;
  const int final_flight = ssl ? 5 : 1;
  if (flight == final_flight) {
    become_ready(now);
  } else if (flight == 0) {
    send_handshake_packet(Side::kServer, 0, true, 1, now);  // SYN-ACK
  } else {
    start_ssl_flight(flight + 1, now);
  }
}

void Connection::send(Side from, StreamId stream, std::int64_t app_bytes,
                      SimTime now) {
  if (!opened_) throw std::logic_error("connection not opened");
  if (app_bytes < 0) throw std::invalid_argument("negative payload");
  if (!known_streams_.count(stream)) {
    throw std::invalid_argument("unknown stream " + std::to_string(stream));
  }
  if (app_bytes == 0) return;  // nothing on the wire
  Sender& snd = sender(from);
  std::uint64_t& offset = snd.next_offset[stream];
  snd.queue.push_back(Chunk{stream, offset, app_bytes});
  offset += static_cast<std::uint64_t>(app_bytes);
  pump(from, now);
}

void Connection::pump(Side from, SimTime now) {
  if (!ready_) return;
  Sender& snd = sender(from);
  while (!snd.queue.empty()) {
    Chunk& head = snd.queue.front();
    const int header = data_header_bytes(from);
    const std::int64_t capacity =
        config_.stack.mtu_bytes - header - per_packet_framing_;
    const std::int64_t take = std::min<std::int64_t>(head.length, capacity);
    const std::int64_t payload = take + per_packet_framing_;
    if (snd.in_flight + payload > snd.cc.cwnd) break;

    const std::uint64_t seq = snd.next_seq++;
    const Chunk chunk{head.stream, head.offset, take};
    snd.unacked[seq] = SentRecord{chunk, now, false};
    snd.in_flight += payload;
    transmit_data(from, seq, chunk, false, now);

    head.offset += static_cast<std::uint64_t>(take);
    head.length -= take;
    if (head.length == 0) snd.queue.pop_front();
  }
  arm_rto(from, now);
}

void Connection::transmit_data(Side from, std::uint64_t seq,
                               const Chunk& chunk, bool retransmit,
                               SimTime now) {
  Packet pkt;
  pkt.seq = seq;
  pkt.chunk = chunk;
  pkt.header_bytes = data_header_bytes(from);
  pkt.framing_bytes = per_packet_framing_;
  pkt.retransmit = retransmit;
  sender(from).sent_any = true;
  const auto result = link_from(from).transmit(pkt.total_bytes(), now);
  account_sent(from, pkt, result.dropped, now);
  if (result.dropped) return;
  const Side to = peer(from);
  queue_.schedule(result.arrival, [this, to, pkt] {
    on_packet(to, pkt, queue_.now());
  });
}

void Connection::send_ack(Side from, SimTime now) {
  Packet pkt;
  pkt.ack = true;
  pkt.ack_upto = receiver(from).contiguous_seq;
  if (config_.stack.quic) {
    pkt.header_bytes = config_.stack.base_header_bytes() +
                       quic_header_len(config_.quic_header_mode, {});
  } else {
    pkt.header_bytes = config_.stack.base_header_bytes();
  }
  const auto result = link_from(from).transmit(pkt.total_bytes(), now);
  account_sent(from, pkt, result.dropped, now);
  if (result.dropped) return;  // acks are not retransmitted
  const Side to = peer(from);
  queue_.schedule(result.arrival, [this, to, pkt] {
    on_packet(to, pkt, queue_.now());
  });
}

void Connection::on_packet(Side at, Packet pkt, SimTime now) {
  account_received(at, pkt);
  if (pkt.handshake) {
    on_handshake_packet(at, pkt, now);
  } else if (pkt.ack) {
    on_ack_packet(at, pkt, now);
  } else {
    on_data_packet(at, pkt, now);
  }
}

void Connection::on_data_packet(Side at, const Packet& pkt, SimTime now) {
  Receiver& rcv = receiver(at);

  // Packet-sequence bookkeeping feeding the cumulative ack.
  if (pkt.seq == rcv.contiguous_seq) {
    ++rcv.contiguous_seq;
    auto it = rcv.out_of_order.begin();
    while (it != rcv.out_of_order.end() && *it == rcv.contiguous_seq) {
      ++rcv.contiguous_seq;
      it = rcv.out_of_order.erase(it);
    }
  } else if (pkt.seq > rcv.contiguous_seq) {
    rcv.out_of_order.insert(pkt.seq);
  }
  // else: duplicate of already-contiguous data; still acked below.

  // Stream reassembly; deliver the contiguous prefix in order.
  StreamRecv& sr = rcv.streams[pkt.chunk.stream];
  const std::uint64_t begin = pkt.chunk.offset;
  const std::uint64_t end = begin + static_cast<std::uint64_t>(pkt.chunk.length);
  if (end > sr.delivered) {
    auto [it, inserted] = sr.pending.try_emplace(begin, end);
    if (!inserted && end > it->second) it->second = end;
  }
  const std::uint64_t before = sr.delivered;
  while (!sr.pending.empty() && sr.pending.begin()->first <= sr.delivered) {
    sr.delivered = std::max(sr.delivered, sr.pending.begin()->second);
    sr.pending.erase(sr.pending.begin());
  }
  if (sr.delivered > before && on_data_) {
    on_data_(at, pkt.chunk.stream, before,
             static_cast<std::int64_t>(sr.delivered - before), now);
  }

  send_ack(at, now);
}

void Connection::on_ack_packet(Side at, const Packet& pkt, SimTime now) {
  Sender& snd = sender(at);
  if (pkt.ack_upto > snd.ack_upto) {
    std::int64_t acked = 0;
    SimTime sample_sent = -1;
    const bool was_in_recovery = snd.in_recovery;
    auto it = snd.unacked.begin();
    while (it != snd.unacked.end() && it->first < pkt.ack_upto) {
      acked += it->second.chunk.length + per_packet_framing_;
      if (!it->second.retransmitted) sample_sent = it->second.last_sent;
      it = snd.unacked.erase(it);
    }
    snd.ack_upto = pkt.ack_upto;
    snd.dup_acks = 0;
    if (acked > 0) {
      snd.in_flight -= acked;
      snd.rto_backoff = 0;
      if (sample_sent >= 0) {
        const SimTime sample = now - sample_sent;
        if (!snd.have_rtt) {
          snd.srtt = sample;
          snd.rttvar = sample / 2;
          snd.have_rtt = true;
        } else {
          const SimTime err = sample > snd.srtt ? sample - snd.srtt
                                                : snd.srtt - sample;
          snd.rttvar = (3 * snd.rttvar + err) / 4;
          snd.srtt = (7 * snd.srtt + sample) / 8;
        }
      }
    }
    if (snd.in_recovery) {
      if (snd.ack_upto >= snd.recovery_until) {
        // Full ack: deflate back to the halved window.
        snd.in_recovery = false;
        snd.cc.cwnd = snd.cc.ssthresh;
      } else if (!snd.unacked.empty()) {
        // Partial ack: repair the next hole, keep the pipe conserved.
        snd.cc.cwnd = std::max(snd.cc.ssthresh,
                               snd.cc.cwnd - acked + snd.cc.mss);
        retransmit_earliest(at, now);
      }
    }
    if (!was_in_recovery && acked > 0) snd.cc.on_ack(acked);
  } else if (pkt.ack_upto == snd.ack_upto && !snd.unacked.empty()) {
    ++snd.dup_acks;
    if (snd.in_recovery) {
      snd.cc.cwnd += snd.cc.mss;  // inflation: each dup ack frees a slot
    } else if (snd.dup_acks == 3) {
      snd.in_recovery = true;
      snd.recovery_until = snd.next_seq;
      snd.cc.on_loss();
      snd.cc.cwnd += 3 * snd.cc.mss;
      retransmit_earliest(at, now);
    }
  }
  arm_rto(at, now);
  pump(at, now);
}

void Connection::retransmit_earliest(Side from, SimTime now) {
  Sender& snd = sender(from);
  if (snd.unacked.empty()) return;
  auto& [seq, record] = *snd.unacked.begin();
  record.retransmitted = true;
  record.last_sent = now;
  transmit_data(from, seq, record.chunk, true, now);
}

void Connection::arm_rto(Side from, SimTime now) {
  Sender& snd = sender(from);
  if (snd.rto_armed) {
    queue_.cancel(snd.rto_event);
    snd.rto_armed = false;
  }
  if (snd.unacked.empty()) return;
  SimTime rto;
  if (snd.have_rtt) {
    rto = std::max({config_.min_rto, 2 * config_.nominal_rtt,
                    snd.srtt + 4 * snd.rttvar});
  } else {
    // RFC-style conservative initial timeout, before any sample exists.
    rto = std::max<SimTime>(kMicrosPerSecond, 2 * config_.nominal_rtt);
  }
  const int shift = std::min(snd.rto_backoff, 6);
  rto = std::min<SimTime>(rto << shift, 60 * kMicrosPerSecond);
  snd.rto_event =
      queue_.schedule(now + rto, [this, from] { on_rto(from, queue_.now()); });
  snd.rto_armed = true;
}

void Connection::on_rto(Side from, SimTime now) {
  Sender& snd = sender(from);
  snd.rto_armed = false;
  if (snd.unacked.empty()) return;
  snd.cc.on_loss();
  snd.in_recovery = true;
  snd.recovery_until = snd.next_seq;
  ++snd.rto_backoff;
  snd.dup_acks = 0;
  retransmit_earliest(from, now);
  arm_rto(from, now);
}

void Connection::account_sent(Side from, const Packet& pkt, bool dropped,
                              SimTime now) {
  WireStats& w = sent_[index(from)];
  ++w.packets;
  w.total_bytes += pkt.total_bytes();
  w.header_bytes += pkt.header_bytes;
  if (pkt.handshake) {
    ++w.handshake_packets;
    w.handshake_bytes += pkt.payload_bytes();
  } else if (pkt.ack) {
    ++w.ack_packets;
    w.ack_bytes += pkt.total_bytes();
  } else {
    w.stream_bytes += pkt.chunk.length;
    w.payload_framing_bytes += pkt.framing_bytes;
    if (pkt.retransmit) {
      ++w.retransmit_packets;
      w.retransmit_bytes += pkt.total_bytes();
    }
  }
  if (packet_log_) {
    const StreamId stream =
        (pkt.handshake || pkt.ack) ? 0 : pkt.chunk.stream;
    packet_log_->push_back(PacketRecord{now, from, pkt.header_bytes,
                                        pkt.payload_bytes(), stream, pkt.seq,
                                        pkt.ack, pkt.handshake, pkt.retransmit,
                                        dropped});
  }
}

void Connection::account_received(Side at, const Packet& pkt) {
  WireStats& w = received_[index(at)];
  ++w.packets;
  w.total_bytes += pkt.total_bytes();
  w.header_bytes += pkt.header_bytes;
  if (pkt.handshake) {
    ++w.handshake_packets;
    w.handshake_bytes += pkt.payload_bytes();
  } else if (pkt.ack) {
    ++w.ack_packets;
    w.ack_bytes += pkt.total_bytes();
  } else {
    w.stream_bytes += pkt.chunk.length;
    w.payload_framing_bytes += pkt.framing_bytes;
    if (pkt.retransmit) {
      ++w.retransmit_packets;
      w.retransmit_bytes += pkt.total_bytes();
    }
  }
}

}  // namespace dashsim
