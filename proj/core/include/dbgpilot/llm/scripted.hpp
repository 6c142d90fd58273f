#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

#include "dbgpilot/llm/chat.hpp"

namespace dbgpilot::llm {

/// Replays pre-written model turns. Each call to complete() consumes the
/// next turn, whatever the conversation says.
///
/// Script format, version 1:
///
///   {"version": 1,
///    "turns": [
///      [{"text": "Let me look."},
///       {"tool_call": {"name": "debug", "arguments": {"command": "bt"}}}],
///      [{"text": "Recommendation: ..."}]]}
///
/// A tool call may give "arguments_raw" (a string sent as-is) instead of
/// "arguments" to exercise malformed payloads. Call ids are
/// "call_<turn>_<item>", both 1-based.
class ScriptedBackend final : public Backend {
 public:
  /// Throws Error(ScriptParseError).
  static ScriptedBackend from_file(const std::filesystem::path& path);
  static ScriptedBackend from_string(std::string_view text);
  static ScriptedBackend from_json(const nlohmann::json& script);

  /// Throws Error(ScriptExhausted) once every turn has been used.
  void complete(const std::vector<ChatMessage>& messages, const std::vector<ToolSpec>& tools,
                const ModelConfig& config, const EventSink& sink) override;
  std::string describe() const override;

  std::size_t turns_total() const noexcept { return turns_.size(); }
  std::size_t turns_used() const noexcept { return next_; }

 private:
  struct Item {
    bool is_call = false;
    std::string text;  // text, or the tool name
    std::string raw_arguments;
  };

  explicit ScriptedBackend(std::vector<std::vector<Item>> turns) : turns_(std::move(turns)) {}

  std::vector<std::vector<Item>> turns_;
  std::size_t next_ = 0;
};

}  // namespace dbgpilot::llm
