#include "dbgpilot/lsp/framing.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>

#include "dbgpilot/errors.hpp"
#include "dbgpilot/text.hpp"

namespace dbgpilot::lsp {

std::string encode_frame(std::string_view body) {
  std::string out = "Content-Length: " + std::to_string(body.size()) + "\r\n\r\n";
  out.append(body);
  return out;
}

std::optional<std::string> FrameDecoder::next() {
  auto end = buffer_.find("\r\n\r\n");
  if (end == std::string::npos) return std::nullopt;

  std::optional<std::size_t> length;
  std::string_view headers(buffer_.data(), end);
  while (!headers.empty()) {
    auto nl = headers.find("\r\n");
    std::string_view line = headers.substr(0, nl);
    headers = nl == std::string_view::npos ? std::string_view{} : headers.substr(nl + 2);
    auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw Error(Errc::LspTransportError, "malformed header line: " + std::string(line));
    }
    std::string name(trim(line.substr(0, colon)));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (name != "content-length") continue;
    std::string_view value = trim(line.substr(colon + 1));
    std::size_t n = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc{} || p != value.data() + value.size()) {
      throw Error(Errc::LspTransportError, "bad Content-Length: " + std::string(value));
    }
    length = n;
  }
  if (!length) throw Error(Errc::LspTransportError, "message without Content-Length");

  const std::size_t start = end + 4;
  if (buffer_.size() - start < *length) return std::nullopt;
  std::string body = buffer_.substr(start, *length);
  buffer_.erase(0, start + *length);
  return body;
}

}  // namespace dbgpilot::lsp
