#include "dashsim/appproto.hpp"

#include <stdexcept>

namespace dashsim {

RequestEncoding AppFraming::encode_request(std::string_view url_path) const {
  if (url_path.size() > static_cast<std::size_t>(kMaxUrlPathBytes)) {
    throw std::invalid_argument("url path exceeds 2048 bytes");
  }
  RequestEncoding enc;
  switch (kind_) {
    case StackKind::kHttp1Quic:
      enc.payload_bytes =
          kHttp1RequestTemplateBytes + static_cast<std::int64_t>(url_path.size());
      break;
    case StackKind::kHttp2Tcp:
    case StackKind::kHttp2Ssl:
      enc.payload_bytes = kFrameHeaderBytes + kCompressedRequestHeaderBytes;
      enc.frames = 1;
      break;
    case StackKind::kSpdyQuic:
      enc.payload_bytes = kCompressedRequestHeaderBytes;
      break;
  }
  return enc;
}

ResponseEncoding AppFraming::encode_response(std::int64_t body_bytes) const {
  if (body_bytes < 0) throw std::invalid_argument("negative body size");
  ResponseEncoding enc;
  enc.body_bytes = body_bytes;
  switch (kind_) {
    case StackKind::kHttp1Quic:
      enc.header_block_bytes = kHttp1ResponseHeaderBytes;
      enc.payload_bytes = enc.header_block_bytes + body_bytes;
      break;
    case StackKind::kHttp2Tcp:
    case StackKind::kHttp2Ssl: {
      enc.header_block_bytes = kCompressedResponseHeaderBytes;
      const int data_frames = body_bytes == 0
                                  ? 1
                                  : static_cast<int>((body_bytes +
                                                      kMaxFramePayloadBytes - 1) /
                                                     kMaxFramePayloadBytes);
      enc.frames = 1 + data_frames;  // HEADERS + DATA frames
      enc.framing_bytes = kFrameHeaderBytes * enc.frames;
      enc.payload_bytes = enc.framing_bytes + enc.header_block_bytes + body_bytes;
      break;
    }
    case StackKind::kSpdyQuic:
      enc.header_block_bytes = kCompressedResponseHeaderBytes;
      enc.payload_bytes = enc.header_block_bytes + body_bytes;
      break;
  }
  return enc;
}

std::int64_t AppFraming::decode_response_body(
    const ResponseEncoding& encoded) const {
  switch (kind_) {
    case StackKind::kHttp1Quic:
      return encoded.payload_bytes - kHttp1ResponseHeaderBytes;
    case StackKind::kHttp2Tcp:
    case StackKind::kHttp2Ssl:
      return encoded.payload_bytes - encoded.framing_bytes -
             kCompressedResponseHeaderBytes;
    case StackKind::kSpdyQuic:
      return encoded.payload_bytes - kCompressedResponseHeaderBytes;
  }
  throw std::logic_error("bad StackKind");
}

StreamId StreamIdAllocator::next() {
  if (!multiplexed_) return 0;
  if (next_id_ >= (1u << 31)) throw std::runtime_error("stream ids exhausted");
  const StreamId id = next_id_;
  next_id_ += 2;
  return id;
}

std::int64_t with_ssl_records(const TransportConfig& config,
                              std::int64_t payload_bytes) {
  if (config.stack.kind != StackKind::kHttp2Ssl || payload_bytes <= 0) {
    return payload_bytes;
  }
  const std::int64_t records =
      (payload_bytes + config.ssl_record_payload_max - 1) /
      config.ssl_record_payload_max;
  return payload_bytes + records * config.ssl_record_bytes;
}

}  // namespace dashsim
