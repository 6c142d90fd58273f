#pragma once

#include <atomic>
#include <mutex>
#include <string>
#include <thread>

namespace dbgpilot {

// Pseudo-terminal that stands in for the target's terminal. Everything the
// target writes to it is kept in memory; a thread drains it so the target
// never blocks on a full terminal buffer.
class TerminalCapture {
 public:
  TerminalCapture();
  ~TerminalCapture();
  TerminalCapture(const TerminalCapture&) = delete;
  TerminalCapture& operator=(const TerminalCapture&) = delete;

  const std::string& slave_path() const noexcept { return slave_path_; }

  // Output so far, including anything still queued in the terminal.
  std::string contents();

 private:
  void drain_locked();
  void run();

  int master_ = -1;
  int slave_ = -1;  // held open so the master never sees a hangup
  std::string slave_path_;
  std::mutex mu_;
  std::string buffer_;
  std::atomic<bool> stop_{false};
  std::thread reader_;
};

}  // namespace dbgpilot
