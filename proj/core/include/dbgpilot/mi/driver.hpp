#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dbgpilot/mi/record.hpp"
#include "dbgpilot/process.hpp"

namespace dbgpilot::mi {

struct DriverOptions {
  /// Debugger executable name or path; looked up on PATH.
  std::string debugger = "gdb";
  std::chrono::milliseconds command_timeout{30'000};
  std::chrono::milliseconds startup_timeout{30'000};
  /// When set, every line written to or read from the debugger is appended
  /// here verbatim.
  std::optional<std::filesystem::path> transcript_path;
};

/// Owns one debugger child process speaking the machine interface.
///
/// Commands are tagged with increasing tokens and serialized: send_command
/// does not return until the tagged result record and the prompt that
/// follows it have been read. Records that arrive between commands (late
/// prompts, async notifications) are queued and handed to the next reader.
class Driver {
 public:
  /// Launches the debugger on `executable` and consumes the startup prompt.
  static Driver spawn(const std::filesystem::path& executable, const DriverOptions& options = {});

  Driver(Driver&&) noexcept = default;
  Driver& operator=(Driver&&) noexcept = default;
  ~Driver();

  bool alive();
  pid_t pid() const noexcept { return child_.pid(); }

  /// Sends one MI command (without token or newline) and returns all records
  /// up to and including the prompt that follows its result record.
  Output send_command(const std::string& command);
  Output send_command(const std::string& command, std::chrono::milliseconds timeout);

  /// Reads until an async exec record of class `cls` arrives, checking records
  /// already queued first. Returns every record consumed, ending with it.
  std::vector<Record> wait_for_async(const std::string& cls, std::chrono::milliseconds timeout);

  /// Sends -gdb-exit and reaps the child.
  void shutdown();

  const DriverOptions& options() const noexcept { return options_; }

 private:
  Driver() = default;

  std::optional<Record> next_record(std::chrono::steady_clock::time_point deadline);
  void log_line(const std::string& line);

  ChildProcess child_;
  LineBuffer lines_;
  std::deque<Record> pending_;
  std::uint64_t next_token_ = 1;
  DriverOptions options_;
  std::unique_ptr<std::ofstream> transcript_;
  bool exited_ = false;
};

/// Escapes `text` as a c-string argument for an MI command.
inline std::string mi_arg(std::string_view text) { return quote_cstring(text); }

}  // namespace dbgpilot::mi
