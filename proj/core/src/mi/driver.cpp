#include "dbgpilot/mi/driver.hpp"

#include <system_error>

#include "dbgpilot/errors.hpp"

namespace dbgpilot::mi {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

Driver Driver::spawn(const fs::path& executable, const DriverOptions& options) {
  std::error_code ec;
  if (!fs::is_regular_file(executable, ec)) {
    throw Error(Errc::TargetNotFound, "target not found: " + executable.string());
  }
  auto debugger = find_executable(options.debugger);
  if (!debugger) {
    throw Error(Errc::DebuggerNotFound, "debugger not found: " + options.debugger);
  }

  Driver d;
  d.options_ = options;
  if (options.transcript_path) {
    d.transcript_ = std::make_unique<std::ofstream>(*options.transcript_path, std::ios::app);
  }
  d.child_ = ChildProcess::spawn({debugger->string(), "--interpreter=mi3", "-q", "-nx",
                                  fs::absolute(executable).string()});

  const auto deadline = Clock::now() + options.startup_timeout;
  for (;;) {
    std::optional<Record> r;
    try {
      r = d.next_record(deadline);
    } catch (const Error& e) {
      throw Error(Errc::ProtocolHandshakeFailed,
                  "no prompt from debugger within startup timeout: " + std::string(e.what()));
    }
    if (!r) {
      throw Error(Errc::ProtocolHandshakeFailed, "debugger exited before its first prompt");
    }
    if (r->is_prompt()) break;
  }
  return d;
}

Driver::~Driver() {
  try {
    shutdown();
  } catch (...) {
  }
}

bool Driver::alive() { return !exited_ && child_.running(); }

void Driver::log_line(const std::string& line) {
  if (!transcript_) return;
  *transcript_ << line << '\n';
  transcript_->flush();
}

std::optional<Record> Driver::next_record(Clock::time_point deadline) {
  if (!pending_.empty()) {
    Record r = std::move(pending_.front());
    pending_.pop_front();
    return r;
  }
  for (;;) {
    if (auto line = lines_.pop_line()) {
      log_line(*line);
      return parse_line(*line);
    }
    if (exited_) return std::nullopt;
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) throw Error(Errc::Timeout, "timed out waiting for the debugger");
    std::string chunk;
    switch (child_.read_some(chunk, remaining)) {
      case ChildProcess::ReadStatus::Data:
        lines_.append(chunk);
        break;
      case ChildProcess::ReadStatus::Eof:
        exited_ = true;
        break;
      case ChildProcess::ReadStatus::Timeout:
        throw Error(Errc::Timeout, "timed out waiting for the debugger");
    }
  }
}

Output Driver::send_command(const std::string& command) {
  return send_command(command, options_.command_timeout);
}

Output Driver::send_command(const std::string& command, std::chrono::milliseconds timeout) {
  if (exited_) throw Error(Errc::DebuggerExited, "debugger has exited");
  const std::uint64_t token = next_token_++;
  std::string line = std::to_string(token) + command;
  log_line(line);
  line.push_back('\n');
  if (!child_.write_all(line)) {
    exited_ = true;
    throw Error(Errc::DebuggerExited, "debugger closed its command channel");
  }

  const auto deadline = Clock::now() + timeout;
  Output out;
  bool have_result = false;
  for (;;) {
    auto r = next_record(deadline);
    if (!r) {
      throw Error(Errc::DebuggerExited, "debugger exited while running: " + command);
    }
    if (r->is_result() && r->token == token) have_result = true;
    bool done = have_result && r->is_prompt();
    out.records.push_back(std::move(*r));
    if (done) return out;
  }
}

std::vector<Record> Driver::wait_for_async(const std::string& cls,
                                           std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  std::vector<Record> seen;
  for (;;) {
    auto r = next_record(deadline);
    if (!r) throw Error(Errc::DebuggerExited, "debugger exited while waiting for *" + cls);
    bool match = r->kind == RecordKind::AsyncExec && r->cls == cls;
    seen.push_back(std::move(*r));
    if (match) return seen;
  }
}

void Driver::shutdown() {
  if (child_.pid() <= 0) return;
  if (!exited_ && child_.running()) {
    log_line("-gdb-exit");
    child_.write_all("-gdb-exit\n");
  }
  exited_ = true;
  child_.terminate(std::chrono::milliseconds(2000));
}

}  // namespace dbgpilot::mi
