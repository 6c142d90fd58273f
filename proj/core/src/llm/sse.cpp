#include "dbgpilot/llm/sse.hpp"

namespace dbgpilot::llm {

void SseParser::feed(std::string_view bytes) {
  partial_.append(bytes);
  std::size_t start = 0;
  for (;;) {
    auto nl = partial_.find('\n', start);
    if (nl == std::string::npos) break;
    std::string_view l(partial_.data() + start, nl - start);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    line(l);
    start = nl + 1;
  }
  partial_.erase(0, start);
}

void SseParser::finish() {
  if (!partial_.empty()) {
    std::string rest = std::move(partial_);
    partial_.clear();
    line(rest);
  }
  dispatch();
}

void SseParser::line(std::string_view l) {
  if (l.empty()) {
    dispatch();
    return;
  }
  if (l.front() == ':') return;  // comment / keep-alive
  auto colon = l.find(':');
  std::string_view field = l.substr(0, colon);
  std::string_view value = colon == std::string_view::npos ? std::string_view{} : l.substr(colon + 1);
  if (!value.empty() && value.front() == ' ') value.remove_prefix(1);
  if (field == "data") {
    if (has_data_) data_.push_back('\n');
    data_.append(value);
    has_data_ = true;
  } else if (field == "event") {
    event_.assign(value);
  }
}

void SseParser::dispatch() {
  if (has_data_) handler_(SseEvent{event_.empty() ? "message" : event_, data_});
  event_.clear();
  data_.clear();
  has_data_ = false;
}

}  // namespace dbgpilot::llm
