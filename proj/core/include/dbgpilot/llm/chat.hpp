#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace dbgpilot::llm {

enum class Role { System, User, Assistant, Tool };

std::string_view to_string(Role role);

struct ToolCallRequest {
  std::string id;
  std::string name;
  nlohmann::json arguments = nlohmann::json::object();
  std::string raw_arguments;  // provider payload, kept for replay

  friend bool operator==(const ToolCallRequest&, const ToolCallRequest&) = default;
};

struct ChatMessage {
  Role role = Role::User;
  std::string content;
  std::optional<std::string> tool_call_id;   // Tool role only
  std::vector<ToolCallRequest> tool_calls;   // Assistant role only

  static ChatMessage system(std::string text) { return {Role::System, std::move(text), {}, {}}; }
  static ChatMessage user(std::string text) { return {Role::User, std::move(text), {}, {}}; }
  static ChatMessage assistant(std::string text, std::vector<ToolCallRequest> calls = {}) {
    return {Role::Assistant, std::move(text), {}, std::move(calls)};
  }
  static ChatMessage tool(std::string id, std::string text) {
    return {Role::Tool, std::move(text), std::move(id), {}};
  }

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ToolParam {
  std::string name;
  std::string description;
};

struct ToolSpec {
  std::string name;
  std::string description;
  std::vector<ToolParam> params;  // all text-valued and required

  /// JSON schema object for the parameters.
  nlohmann::json parameters_schema() const;
};

/// The three tools offered to the model: debug, code and definition.
std::vector<ToolSpec> default_tools();

struct TextDelta {
  std::string text;
};
struct ToolCallEvent {
  ToolCallRequest call;
};
struct Done {
  std::string finish_reason;  // "stop", "tool_calls", "length", ...
};
/// A tool call whose argument payload did not validate. Recoverable: the
/// loop answers it with the error text instead of running anything.
struct MalformedToolCall {
  ToolCallRequest call;
  std::string error;
};

using CompletionEvent = std::variant<TextDelta, ToolCallEvent, Done, MalformedToolCall>;
using EventSink = std::function<void(const CompletionEvent&)>;

struct ModelConfig {
  std::string model = "gpt-4o";
  std::optional<double> temperature;  // provider default when unset
  int max_retries = 3;
  std::chrono::milliseconds request_timeout{120'000};
};

/// One chat-completion provider. complete() delivers events in provider
/// order and ends with exactly one Done unless it throws.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual void complete(const std::vector<ChatMessage>& messages,
                        const std::vector<ToolSpec>& tools, const ModelConfig& config,
                        const EventSink& sink) = 0;
  /// Short description for transcript headers.
  virtual std::string describe() const = 0;
};

/// Parses and validates a raw argument payload for `name` against `tools`.
/// Throws Error(MalformedToolArgs).
ToolCallRequest make_tool_call(std::string id, std::string name, std::string raw_arguments,
                               const std::vector<ToolSpec>& tools);

/// Checks tool-call bookkeeping: every assistant tool call is answered by
/// exactly one following Tool message with its id before the next
/// non-tool message, and no Tool message is unsolicited. Returns a
/// description of the first violation.
std::optional<std::string> validate_conversation(const std::vector<ChatMessage>& messages);

/// Wire form used by chat-completions providers.
nlohmann::json to_wire(const ChatMessage& message);
nlohmann::json to_wire(const ToolSpec& tool);

}  // namespace dbgpilot::llm
