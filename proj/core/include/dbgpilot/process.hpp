#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

namespace dbgpilot {

/// Searches PATH for `name` unless it already contains a slash.
std::optional<std::filesystem::path> find_executable(std::string_view name);

/// A child process with piped stdin/stdout. stderr goes to /dev/null.
///
/// The child runs in its own process group so terminal interrupts reach
/// only the foreground tool. Destruction terminates the whole group.
class ChildProcess {
 public:
  enum class ReadStatus { Data, Eof, Timeout };

  static ChildProcess spawn(const std::vector<std::string>& argv);

  ChildProcess() = default;
  ChildProcess(ChildProcess&& other) noexcept;
  ChildProcess& operator=(ChildProcess&& other) noexcept;
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;
  ~ChildProcess();

  pid_t pid() const noexcept { return pid_; }
  bool running();

  /// Writes all bytes; returns false if the pipe is closed.
  bool write_all(std::string_view bytes);

  /// Reads whatever is available, waiting at most `timeout`.
  ReadStatus read_some(std::string& out, std::chrono::milliseconds timeout);

  void close_stdin();

  /// Waits up to `grace` for a voluntary exit, then escalates to SIGTERM and
  /// SIGKILL on the process group. Returns the exit status if reaped.
  std::optional<int> terminate(std::chrono::milliseconds grace);

 private:
  void release() noexcept;

  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  std::optional<int> exit_status_;
};

/// A file created under the temp directory and removed on destruction.
class TempFile {
 public:
  static TempFile create(std::string_view prefix);

  TempFile() = default;
  TempFile(TempFile&& other) noexcept : path_(std::move(other.path_)) { other.path_.clear(); }
  TempFile& operator=(TempFile&& other) noexcept;
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  ~TempFile() { remove(); }

  const std::filesystem::path& path() const noexcept { return path_; }
  void remove() noexcept;

 private:
  std::filesystem::path path_;
};

/// Splits a byte stream into newline-terminated lines.
class LineBuffer {
 public:
  void append(std::string_view bytes) { buffer_.append(bytes); }
  /// Pops one line without its terminator ("\n" or "\r\n").
  std::optional<std::string> pop_line();
  bool empty() const noexcept { return buffer_.empty(); }

 private:
  std::string buffer_;
};

}  // namespace dbgpilot
