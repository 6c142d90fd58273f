#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace dbgpilot::llm {

struct SseEvent {
  std::string event;  // "message" unless the stream names it
  std::string data;   // data lines joined with '\n'
};

/// Incremental server-sent-events decoder. Bytes may arrive split anywhere.
class SseParser {
 public:
  using Handler = std::function<void(const SseEvent&)>;

  explicit SseParser(Handler handler) : handler_(std::move(handler)) {}

  void feed(std::string_view bytes);
  /// Dispatches a final event that was not followed by a blank line.
  void finish();

 private:
  void line(std::string_view l);
  void dispatch();

  Handler handler_;
  std::string partial_;
  std::string event_;
  std::string data_;
  bool has_data_ = false;
};

}  // namespace dbgpilot::llm
