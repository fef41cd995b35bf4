#include "dashsim/stack.hpp"

#include <stdexcept>

namespace dashsim {

std::string to_string(StackKind kind) {
  switch (kind) {
    case StackKind::kHttp2Tcp:
      return "h2-tcp";
    case StackKind::kHttp2Ssl:
      return "h2-ssl";
    case StackKind::kHttp1Quic:
      return "h1-quic";
    case StackKind::kSpdyQuic:
      return "spdy-quic";
  }
  throw std::logic_error("bad StackKind");
}

StackKind stack_from_string(std::string_view name) {
  if (name == "h2-tcp") return StackKind::kHttp2Tcp;
  if (name == "h2-ssl") return StackKind::kHttp2Ssl;
  if (name == "h1-quic") return StackKind::kHttp1Quic;
  if (name == "spdy-quic") return StackKind::kSpdyQuic;
  throw std::invalid_argument("unknown stack: " + std::string(name) +
                              " (expected h2-tcp|h2-ssl|h1-quic|spdy-quic)");
}

StackConfig StackConfig::make(StackKind kind) {
  StackConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case StackKind::kHttp2Tcp:
      cfg.transport_header_bytes = 32;
      cfg.mtu_bytes = 1514;
      cfg.handshake_rtts = 1;
      cfg.quic = false;
      break;
    case StackKind::kHttp2Ssl:
      cfg.transport_header_bytes = 32;
      cfg.mtu_bytes = 1514;
      cfg.handshake_rtts = 3;  // TCP + 2 for the TLS exchange
      cfg.quic = false;
      break;
    case StackKind::kHttp1Quic:
    case StackKind::kSpdyQuic:
      cfg.transport_header_bytes = 8;
      cfg.mtu_bytes = 1242;
      cfg.handshake_rtts = 0;
      cfg.quic = true;
      break;
  }
  return cfg;
}

int quic_header_len(QuicHeaderMode mode, const QuicPacketContext& ctx) {
  switch (mode) {
    case QuicHeaderMode::kMinimal:
      return 2;  // 1 flags + 1 sequence
    case QuicHeaderMode::kDefault:
      // 1 flags + 8 connection id + 4 sequence + 1 private flags,
      // plus 4 version bytes on the connection's first packet.
      return ctx.first_packet ? 18 : 14;
    case QuicHeaderMode::kMaximal:
      return 19;  // flags + 8 cid + 4 version + 6 sequence
  }
  throw std::logic_error("bad QuicHeaderMode");
}

}  // namespace dashsim
