#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbgpilot/debugger_session.hpp"
#include "dbgpilot/enriched_stack.hpp"
#include "dbgpilot/llm/chat.hpp"
#include "dbgpilot/prompt.hpp"
#include "dbgpilot/sanitizer.hpp"
#include "dbgpilot/source_nav.hpp"

namespace dbgpilot {

/// True when the first word names a debugger console command or one of the
/// local `code`/`definition` commands. Anything else is a question.
bool is_debugger_command(std::string_view line);

/// The words recognised by is_debugger_command.
const std::set<std::string, std::less<>>& debugger_command_words();

/// Drops the "$N = " value-history prefix from print output.
std::string tidy_print_output(std::string_view command, std::string_view output);

/// Line-delimited JSON log of a session. Holds nothing nondeterministic.
class Transcript {
 public:
  Transcript() = default;
  /// Throws Error(ConfigError) if the file cannot be created.
  explicit Transcript(const std::filesystem::path& path);

  void write(const nlohmann::json& entry);
  bool enabled() const noexcept { return out_.is_open(); }

 private:
  std::ofstream out_;
};

/// Terminal rendering of assistant output. Prose passes through verbatim;
/// tool calls print as "→ command" followed by the output indented two
/// spaces, set off from prose by blank lines.
class AssistantPrinter {
 public:
  explicit AssistantPrinter(std::ostream& out) : out_(out) {}

  void prose(std::string_view text);
  void echo(std::string_view command, std::string_view output);
  void notice(std::string_view text);
  /// Terminates a pending line.
  void finish();

 private:
  void begin_block();
  void put(std::string_view text);

  std::ostream& out_;
  bool at_line_start_ = true;
  bool blank_before_ = true;
  bool wrote_ = false;
};

struct WheelOptions {
  std::string prompt_label = std::string(kDefaultPromptLabel);
  std::size_t tool_call_cap = 16;
  TokenBudget budget;
  llm::ModelConfig model;
  EnrichOptions enrich;
  std::string stdin_text;  // what the target was fed, for the inputs section
};

enum class TurnEnd { Done, ToolCap, Error, Interrupted };

std::string_view to_string(TurnEnd end);

struct TurnResult {
  std::string text;  // all prose streamed during the turn
  std::size_t tool_calls = 0;
  TurnEnd end = TurnEnd::Done;
  std::string error;  // for Error and Interrupted
};

/// The loop that routes input to the debugger or the model and runs the
/// model's tool calls.
class WheelLoop {
 public:
  WheelLoop(DebugTarget& target, llm::Backend& backend, SourceNavigator& nav,
            SanitizerPolicy policy, WheelOptions options, std::ostream& out,
            Transcript* transcript = nullptr);

  /// Dispatches one line of user input. Errors are printed, never thrown.
  void handle_input(std::string_view line);

  /// Runs a user debugger command (or code/definition), prints it and
  /// appends it to the history.
  void run_user_command(std::string_view line);

  /// Sends `prompt` and services tool calls until the model finishes.
  TurnResult run_chat_turn(std::vector<llm::ChatMessage> prompt);

  /// Prompt messages for the next question, initial or follow-up.
  std::vector<llm::ChatMessage> build_prompt(std::string_view user_text);

  /// Output for one tool call, with `denied` set when the sanitizer refused.
  std::string execute_tool(const llm::ToolCallRequest& call, bool& denied);

  const std::vector<HistoryEntry>& history() const noexcept { return history_; }
  const std::vector<llm::ChatMessage>& messages() const noexcept { return messages_; }
  bool chat_in_progress() const noexcept { return chat_in_progress_; }
  std::size_t turn_count() const noexcept { return turn_count_; }

 private:
  std::string run_local_command(std::string_view line);
  void log(const nlohmann::json& entry);

  DebugTarget& target_;
  llm::Backend& backend_;
  SourceNavigator& nav_;
  SanitizerPolicy policy_;
  WheelOptions options_;
  AssistantPrinter printer_;
  std::ostream& out_;
  Transcript* transcript_;
  std::vector<llm::ToolSpec> tools_;

  std::vector<HistoryEntry> history_;
  std::vector<llm::ChatMessage> messages_;
  bool chat_in_progress_ = false;
  std::size_t turn_count_ = 0;
};

}  // namespace dbgpilot
