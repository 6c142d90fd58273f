#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace dbgpilot::lsp {

/// Wraps a message body in a Content-Length header.
std::string encode_frame(std::string_view body);

/// Incremental decoder for Content-Length framed messages.
class FrameDecoder {
 public:
  void feed(std::string_view bytes) { buffer_.append(bytes); }

  /// Next complete body, or nullopt if more bytes are needed. Throws
  /// Error(LspTransportError) on a malformed header.
  std::optional<std::string> next();

  bool empty() const noexcept { return buffer_.empty(); }

 private:
  std::string buffer_;
};

}  // namespace dbgpilot::lsp
