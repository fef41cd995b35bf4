#pragma once

#include <string>
#include <string_view>

namespace dashsim {

// The four evaluated application/transport combinations.
enum class StackKind { kHttp2Tcp, kHttp2Ssl, kHttp1Quic, kSpdyQuic };

inline constexpr StackKind kAllStacks[] = {
    StackKind::kHttp2Tcp, StackKind::kHttp2Ssl, StackKind::kHttp1Quic,
    StackKind::kSpdyQuic};

// CLI spellings: h2-tcp, h2-ssl, h1-quic, spdy-quic.
std::string to_string(StackKind kind);
StackKind stack_from_string(std::string_view name);

// Per-layer header bytes, path MTU and handshake cost of one stack.
struct StackConfig {
  StackKind kind = StackKind::kHttp2Tcp;
  int ethernet_header_bytes = 14;
  int ip_header_bytes = 20;
  int transport_header_bytes = 32;  // TCP 32 (20 + 12 options), UDP 8
  int mtu_bytes = 1514;             // 1514 TCP path, 1242 QUIC path
  int handshake_rtts = 1;           // TCP 1, +2 for SSL, QUIC 0
  bool quic = false;

  static StackConfig make(StackKind kind);

  int base_header_bytes() const {
    return ethernet_header_bytes + ip_header_bytes + transport_header_bytes;
  }

  // (ethernet + ip + transport) / MTU; the framing layer is excluded.
  double analytic_overhead() const {
    return static_cast<double>(base_header_bytes()) / mtu_bytes;
  }
};

// Packet-header length policy. The header varies between 2 and 19 bytes
// depending on which of flags / connection id / version / sequence fields are
// carried.
enum class QuicHeaderMode { kMinimal, kDefault, kMaximal };

struct QuicPacketContext {
  bool first_packet = false;  // version bytes ride only on the first packet
};

int quic_header_len(QuicHeaderMode mode, const QuicPacketContext& ctx = {});

}  // namespace dashsim
