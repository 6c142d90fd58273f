#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dbgpilot/mi/driver.hpp"
#include "dbgpilot/source_loc.hpp"

namespace dbgpilot {

class TerminalCapture;

struct Frame {
  int index = 0;  // 0 = innermost
  std::string function;
  std::optional<std::filesystem::path> file;  // present iff line is present
  std::optional<int> line;
  std::optional<std::string> pc;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct VariableBinding {
  std::string name;
  std::string type;       // static type from debug info
  std::string raw_value;  // debugger rendering, before enrichment
  bool is_pointer = false;

  friend bool operator==(const VariableBinding&, const VariableBinding&) = default;
};

/// A global or file-static variable known to the debug info.
struct GlobalSymbol {
  std::string name;
  std::string type;
  std::filesystem::path file;
  int line = 0;
};

enum class StopReason { Breakpoint, Signal, Exited, AssertionFailure, Other };

struct StopEvent {
  StopReason reason = StopReason::Other;
  std::string other_reason;                   // raw reason for Other
  std::optional<std::string> signal_name;     // always set for Signal
  std::optional<std::string> signal_meaning;
  std::optional<int> exit_code;
  std::optional<Frame> frame;
  std::string detail;
  std::string assertion;  // asserted expression, for AssertionFailure

  friend bool operator==(const StopEvent&, const StopEvent&) = default;
};

std::string_view to_string(StopReason reason);

/// True for type strings that denote a data or function pointer.
bool is_pointer_type(std::string_view type);

/// What the enricher, the navigation tools and the command loop need from a
/// stopped debuggee. DebuggerSession is the live implementation; tests plug
/// in synthetic ones.
class DebugTarget {
 public:
  virtual ~DebugTarget() = default;

  virtual const StopEvent& last_stop() const = 0;
  virtual bool is_stopped() const = 0;
  /// Innermost-first, capped at the configured frame limit.
  virtual std::vector<Frame> backtrace() = 0;
  /// Full stack depth, including frames beyond the cap.
  virtual std::size_t stack_depth() = 0;
  virtual std::vector<VariableBinding> frame_variables(int frame) = 0;
  /// Side-effect-free evaluation in a given frame; nullopt on any failure.
  virtual std::optional<std::string> try_evaluate(std::string_view expression, int frame) = 0;
  /// Debug-info globals whose names are in `names`.
  virtual std::vector<GlobalSymbol> global_variables(const std::vector<std::string>& names) = 0;
  /// Runs a console command and returns its captured text.
  virtual std::string execute_console(std::string_view command) = 0;
  /// Definition site of a function, variable or type from debug info.
  virtual std::optional<SourceLoc> lookup_symbol(std::string_view name) = 0;
  /// Target stdout/stderr captured since launch.
  virtual std::string captured_output() = 0;
  virtual std::vector<std::string> target_args() const = 0;
};

struct SessionOptions {
  mi::DriverOptions driver;
  std::chrono::milliseconds run_timeout{30'000};
  std::size_t frame_cap = 200;
  /// Applied to the last `assertion_scan_lines` lines of target output when
  /// the target stops on SIGABRT.
  std::string assertion_pattern = R"(Assertion [`'](.+)' failed|Assertion failed: (.+))";
  std::size_t assertion_scan_lines = 50;
  /// Fed to the target's standard input; /dev/null when unset.
  std::optional<std::filesystem::path> stdin_path;
};

/// A live debugger attached to one target executable.
class DebuggerSession final : public DebugTarget {
 public:
  static DebuggerSession launch(const std::filesystem::path& executable,
                                std::vector<std::string> args, SessionOptions options = {});

  DebuggerSession(DebuggerSession&&) noexcept;
  DebuggerSession& operator=(DebuggerSession&&) noexcept;
  ~DebuggerSession() override;

  /// Starts (or resumes) the target and waits for the next stop.
  StopEvent run_to_stop();

  /// Expression value in the selected frame; throws Error(EvaluationError).
  std::string evaluate(std::string_view expression);

  const StopEvent& last_stop() const override { return stop_; }
  bool is_stopped() const override { return state_ == State::Stopped; }
  std::vector<Frame> backtrace() override;
  std::size_t stack_depth() override;
  std::vector<VariableBinding> frame_variables(int frame) override;
  std::optional<std::string> try_evaluate(std::string_view expression, int frame) override;
  std::vector<GlobalSymbol> global_variables(const std::vector<std::string>& names) override;
  std::string execute_console(std::string_view command) override;
  std::optional<SourceLoc> lookup_symbol(std::string_view name) override;
  std::string captured_output() override;
  std::vector<std::string> target_args() const override { return args_; }

  mi::Driver& driver() { return driver_; }
  const std::filesystem::path& executable() const noexcept { return executable_; }
  void shutdown();

 private:
  enum class State { Loaded, Stopped, Exited };

  DebuggerSession(mi::Driver driver, std::filesystem::path executable,
                  std::vector<std::string> args, SessionOptions options);

  void require_stopped() const;
  void apply_stop(const mi::Record& stopped);
  void note_exits(const mi::Output& out);
  std::string thread_frame_options(int frame) const;

  mi::Driver driver_;
  std::filesystem::path executable_;
  std::vector<std::string> args_;
  SessionOptions options_;
  std::unique_ptr<TerminalCapture> capture_;
  State state_ = State::Loaded;
  StopEvent stop_;
  std::string thread_id_ = "1";
};

/// Parses a `*stopped` record. Assertion detection is applied separately.
StopEvent stop_event_from_record(const mi::Record& stopped);

/// Upgrades a SIGABRT stop to AssertionFailure when the tail of `output`
/// matches `pattern`.
StopEvent detect_assertion(StopEvent stop, std::string_view output, const std::string& pattern,
                           std::size_t scan_lines);

/// Decodes a frame tuple from -stack-list-frames / *stopped.
Frame frame_from_mi(const mi::Value& tuple, int fallback_index = 0);

}  // namespace dbgpilot
