#pragma once

#include <cstdint>
#include <string_view>

#include "dashsim/sim_time.hpp"
#include "dashsim/stack.hpp"
#include "dashsim/transport.hpp"

namespace dashsim {

// Fixed header-block model sizes. Real deployments compress headers
// (HPACK/zlib); fixing the sizes keeps overhead measurements deterministic
// and gives all four stacks the same logical header content.
inline constexpr std::int64_t kHttp1RequestTemplateBytes = 160;
inline constexpr std::int64_t kHttp1ResponseHeaderBytes = 256;
inline constexpr std::int64_t kCompressedRequestHeaderBytes = 48;
inline constexpr std::int64_t kCompressedResponseHeaderBytes = 64;
inline constexpr std::int64_t kFrameHeaderBytes = 8;
inline constexpr std::int64_t kMaxFramePayloadBytes = 16'384;
inline constexpr std::int64_t kMaxUrlPathBytes = 2'048;

struct RequestEncoding {
  std::int64_t payload_bytes = 0;  // application payload put on the stream
  int frames = 0;                  // binary frames (HTTP/2 only)
};

struct ResponseEncoding {
  std::int64_t payload_bytes = 0;  // header block + framed body
  std::int64_t body_bytes = 0;
  std::int64_t framing_bytes = 0;  // 8 * frames for HTTP/2, else 0
  std::int64_t header_block_bytes = 0;
  int frames = 0;
};

// Application-layer framing arithmetic for one stack:
//  - HTTP/1.1: text request (template + path), response header block + raw
//    body, no further framing (content length always declared).
//  - HTTP/2: 8-byte frame header per HEADERS/DATA frame, DATA payload capped
//    at 16384 bytes; an empty body still produces one empty DATA frame.
//  - SPDY over QUIC: header block followed by the body on a QUIC stream, no
//    extra framing layer.
class AppFraming {
 public:
  explicit AppFraming(StackKind kind) : kind_(kind) {}

  StackKind kind() const { return kind_; }

  RequestEncoding encode_request(std::string_view url_path) const;
  ResponseEncoding encode_response(std::int64_t body_bytes) const;

  // Inverse of encode_response on the framed byte count; round-trip checks.
  std::int64_t decode_response_body(const ResponseEncoding& encoded) const;

 private:
  StackKind kind_;
};

// Client-initiated stream ids: odd and strictly increasing. A plain
// HTTP/1.1-over-TCP conversation has no stream concept and always yields 0.
class StreamIdAllocator {
 public:
  explicit StreamIdAllocator(bool multiplexed) : multiplexed_(multiplexed) {}

  StreamId next();

 private:
  bool multiplexed_;
  StreamId next_id_ = 1;
};

// SSL record layer: +29 bytes per started 16 KiB of application payload.
// Identity for every other stack.
std::int64_t with_ssl_records(const TransportConfig& config,
                              std::int64_t payload_bytes);

// One row of the --dump-packets frame CSV.
struct FrameRecord {
  SimTime time = 0;
  StreamId stream = 0;
  char type = 'D';  // 'H' headers, 'D' data, 'R' raw (no framing layer)
  std::int64_t bytes = 0;
};

}  // namespace dashsim
