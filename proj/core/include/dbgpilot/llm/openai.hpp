#pragma once

#include <string>

#include "dbgpilot/llm/chat.hpp"

namespace dbgpilot::llm {

struct RemoteOptions {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
};

/// Streaming chat-completions client over HTTPS.
///
/// Text deltas are delivered as they arrive; tool calls are assembled from
/// their fragments and delivered when the stream ends, in index order.
/// Failures before the first event are retried up to the configured cap;
/// once anything was delivered, errors propagate.
class RemoteBackend final : public Backend {
 public:
  explicit RemoteBackend(RemoteOptions options);

  /// Throws Error(AuthError) without touching the network when the key
  /// variable is unset or empty; otherwise AuthError, RateLimited (detail =
  /// retry-after seconds), TransportError or Interrupted.
  void complete(const std::vector<ChatMessage>& messages, const std::vector<ToolSpec>& tools,
                const ModelConfig& config, const EventSink& sink) override;
  std::string describe() const override;

  /// The request body complete() would send.
  static nlohmann::json request_body(const std::vector<ChatMessage>& messages,
                                     const std::vector<ToolSpec>& tools,
                                     const ModelConfig& config);

 private:
  RemoteOptions options_;
};

}  // namespace dbgpilot::llm
