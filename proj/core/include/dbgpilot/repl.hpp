#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dbgpilot {

struct ReplConfig {
  std::filesystem::path target;
  std::vector<std::string> target_args;

  std::string model = "gpt-4o";
  std::optional<double> temperature;
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
  /// Scripted backend; no network use when set.
  std::optional<std::filesystem::path> script;

  std::filesystem::path workspace_root = std::filesystem::current_path();
  bool unsafe = false;
  std::optional<std::filesystem::path> whitelist;

  std::optional<std::filesystem::path> log;      // session transcript (JSON lines)
  std::optional<std::filesystem::path> mi_log;   // raw debugger traffic
  std::optional<std::filesystem::path> lsp_log;  // language-server traffic

  std::size_t budget = 16000;
  int window = 10;
  std::size_t tool_call_cap = 16;
  std::optional<std::filesystem::path> stdin_path;

  std::string debugger = "gdb";
  std::string clangd = "clangd";
  bool no_lsp = false;
  std::chrono::seconds timeout{30};
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitStartup = 1;
inline constexpr int kExitUsage = 2;

/// Runs a whole session: starts the debugger, runs the target to its first
/// stop, prints the stop report and reads commands from `in` until EOF or
/// quit. When `echo_input` is set each line read is written after the
/// prompt, so that piped sessions read like interactive ones.
int run_repl(const ReplConfig& config, std::istream& in, std::ostream& out, std::ostream& err,
             bool echo_input);

}  // namespace dbgpilot
