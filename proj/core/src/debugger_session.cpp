#include "dbgpilot/debugger_session.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "dbgpilot/errors.hpp"
#include "dbgpilot/text.hpp"
#include "internal/terminal_capture.hpp"

namespace dbgpilot {

namespace fs = std::filesystem;
using mi::Output;
using mi::Record;
using mi::Value;

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Breakpoint: return "breakpoint";
    case StopReason::Signal: return "signal";
    case StopReason::Exited: return "exited";
    case StopReason::AssertionFailure: return "assertion-failure";
    case StopReason::Other: return "other";
  }
  return "other";
}

bool is_pointer_type(std::string_view type) {
  std::string_view t = trim(type);
  if (t.empty()) return false;
  if (t.back() == '*') return true;
  // function pointers: "int (*)(int)"
  return t.find("(*)") != std::string_view::npos;
}

namespace {

std::string shell_quote(std::string_view arg) {
  std::string out = "'";
  for (char c : arg) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

std::optional<int> parse_int(std::string_view text, int base = 10) {
  if (text.empty()) return std::nullopt;
  std::string s(text);
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, base);
  if (end == s.c_str() || *end != '\0') return std::nullopt;
  return static_cast<int>(v);
}

const Record& expect_done(const Output& out, std::string_view what) {
  const Record* r = out.result();
  if (!r) throw Error(Errc::DebuggerExited, "no result record for " + std::string(what));
  return *r;
}

std::string error_message(const Record& r) { return r.get_text("msg", "unknown debugger error"); }

}  // namespace

Frame frame_from_mi(const Value& tuple, int fallback_index) {
  Frame f;
  f.index = parse_int(tuple.get_text("level")).value_or(fallback_index);
  f.function = tuple.get_text("func", "??");
  std::string addr = tuple.get_text("addr");
  if (!addr.empty()) f.pc = addr;
  std::string file = tuple.get_text("fullname");
  if (file.empty()) file = tuple.get_text("file");
  auto line = parse_int(tuple.get_text("line"));
  if (!file.empty() && line && *line > 0) {
    f.file = fs::path(file);
    f.line = line;
  }
  return f;
}

StopEvent stop_event_from_record(const Record& stopped) {
  StopEvent ev;
  std::string reason = stopped.get_text("reason");
  if (const Value* frame = stopped.find("frame"); frame && frame->is_tuple()) {
    ev.frame = frame_from_mi(*frame, 0);
  }
  if (reason == "signal-received") {
    ev.reason = StopReason::Signal;
    ev.signal_name = stopped.get_text("signal-name", "SIGUNKNOWN");
    std::string meaning = stopped.get_text("signal-meaning");
    if (!meaning.empty()) ev.signal_meaning = meaning;
    ev.detail = *ev.signal_name + (meaning.empty() ? "" : ", " + meaning);
  } else if (reason == "exited-normally") {
    ev.reason = StopReason::Exited;
    ev.exit_code = 0;
    ev.detail = "exited normally";
  } else if (reason == "exited") {
    ev.reason = StopReason::Exited;
    // the debugger prints exit codes in octal
    ev.exit_code = parse_int(stopped.get_text("exit-code"), 8).value_or(-1);
    ev.detail = "exited with code " + std::to_string(*ev.exit_code);
  } else if (reason == "breakpoint-hit") {
    ev.reason = StopReason::Breakpoint;
    ev.detail = "breakpoint " + stopped.get_text("bkptno", "?") + " hit";
  } else {
    ev.reason = StopReason::Other;
    ev.other_reason = reason.empty() ? "unknown" : reason;
    std::string sig = stopped.get_text("signal-name");
    if (!sig.empty()) ev.signal_name = sig;
    ev.detail = ev.other_reason + (sig.empty() ? "" : " (" + sig + ")");
  }
  return ev;
}

StopEvent detect_assertion(StopEvent stop, std::string_view output, const std::string& pattern,
                           std::size_t scan_lines) {
  if (stop.reason != StopReason::Signal || stop.signal_name != "SIGABRT") return stop;
  std::vector<std::string_view> lines = split_lines(output);
  std::size_t first = lines.size() > scan_lines ? lines.size() - scan_lines : 0;
  std::regex re(pattern);
  for (std::size_t i = lines.size(); i-- > first;) {
    std::string line(lines[i]);
    std::smatch m;
    if (std::regex_search(line, m, re)) {
      stop.reason = StopReason::AssertionFailure;
      stop.detail = std::string(trim(line));
      stop.assertion = m.str(0);
      for (std::size_t g = 1; g < m.size(); ++g) {
        if (m[g].matched && m[g].length() > 0) {
          stop.assertion = m.str(g);
          break;
        }
      }
      return stop;
    }
  }
  return stop;
}

DebuggerSession::DebuggerSession(mi::Driver driver, fs::path executable,
                                 std::vector<std::string> args, SessionOptions options)
    : driver_(std::move(driver)),
      executable_(std::move(executable)),
      args_(std::move(args)),
      options_(std::move(options)) {}

DebuggerSession::DebuggerSession(DebuggerSession&&) noexcept = default;
DebuggerSession& DebuggerSession::operator=(DebuggerSession&&) noexcept = default;

DebuggerSession::~DebuggerSession() {
  try {
    shutdown();
  } catch (...) {
  }
}

void DebuggerSession::shutdown() {
  driver_.shutdown();
  capture_.reset();
}

DebuggerSession DebuggerSession::launch(const fs::path& executable, std::vector<std::string> args,
                                        SessionOptions options) {
  mi::Driver driver = mi::Driver::spawn(executable, options.driver);
  DebuggerSession s(std::move(driver), fs::absolute(executable), std::move(args),
                    std::move(options));
  s.capture_ = std::make_unique<TerminalCapture>();

  for (const char* setting : {"confirm off", "width 0", "height 0", "print pretty off",
                              "print elements 1000", "print repeats 10"}) {
    s.driver_.send_command(std::string("-gdb-set ") + setting);
  }

  std::string arg_line;
  for (const auto& a : s.args_) {
    arg_line += shell_quote(a);
    arg_line.push_back(' ');
  }
  fs::path input = s.options_.stdin_path ? fs::absolute(*s.options_.stdin_path) : "/dev/null";
  arg_line += "< " + shell_quote(input.string());
  Output tty_out = s.driver_.send_command("-inferior-tty-set " + s.capture_->slave_path());
  const Record& tty = expect_done(tty_out, "inferior-tty-set");
  if (tty.cls == "error") throw Error(Errc::ConfigError, error_message(tty));
  Output out = s.driver_.send_command("-interpreter-exec console " +
                                      mi::mi_arg("set args " + arg_line));
  const Record& r = expect_done(out, "set args");
  if (r.cls == "error") throw Error(Errc::ConfigError, error_message(r));
  return s;
}

void DebuggerSession::apply_stop(const Record& stopped) {
  StopEvent ev = stop_event_from_record(stopped);
  std::string thread = stopped.get_text("thread-id");
  if (!thread.empty()) thread_id_ = thread;
  ev = detect_assertion(std::move(ev), captured_output(), options_.assertion_pattern,
                        options_.assertion_scan_lines);
  state_ = ev.reason == StopReason::Exited ? State::Exited : State::Stopped;
  stop_ = std::move(ev);
}

void DebuggerSession::note_exits(const Output& out) {
  for (const auto& r : out.records) {
    if (r.kind == mi::RecordKind::AsyncNotify && r.cls == "thread-group-exited") {
      if (state_ == State::Stopped) {
        state_ = State::Exited;
        stop_ = StopEvent{};
        stop_.reason = StopReason::Exited;
        if (auto code = parse_int(r.get_text("exit-code"), 8)) stop_.exit_code = code;
        stop_.detail = "target terminated";
      }
    }
  }
}

StopEvent DebuggerSession::run_to_stop() {
  const bool resume = state_ == State::Stopped;
  Output out = driver_.send_command(resume ? "-exec-continue" : "-exec-run", options_.run_timeout);
  const Record& r = expect_done(out, "run");
  if (r.cls == "error") throw Error(Errc::EvaluationError, error_message(r));
  if (const Record* stopped = out.async_exec("stopped")) {
    apply_stop(*stopped);
    return stop_;
  }
  auto seen = driver_.wait_for_async("stopped", options_.run_timeout);
  apply_stop(seen.back());
  return stop_;
}

void DebuggerSession::require_stopped() const {
  if (state_ != State::Stopped) throw Error(Errc::NotStopped, "the target is not stopped");
}

std::string DebuggerSession::thread_frame_options(int frame) const {
  return " --thread " + thread_id_ + " --frame " + std::to_string(frame);
}

std::vector<Frame> DebuggerSession::backtrace() {
  require_stopped();
  Output out = driver_.send_command("-stack-list-frames 0 " +
                                    std::to_string(options_.frame_cap - 1));
  const Record& r = expect_done(out, "-stack-list-frames");
  if (r.cls == "error") throw Error(Errc::NotStopped, error_message(r));
  std::vector<Frame> frames;
  if (const Value* stack = r.find("stack")) {
    for (const auto& item : stack->children()) {
      if (item.value.is_tuple()) {
        frames.push_back(frame_from_mi(item.value, static_cast<int>(frames.size())));
      }
    }
  }
  return frames;
}

std::size_t DebuggerSession::stack_depth() {
  require_stopped();
  Output out = driver_.send_command("-stack-info-depth");
  const Record& r = expect_done(out, "-stack-info-depth");
  if (r.cls == "error") throw Error(Errc::NotStopped, error_message(r));
  return static_cast<std::size_t>(parse_int(r.get_text("depth")).value_or(0));
}

std::vector<VariableBinding> DebuggerSession::frame_variables(int frame) {
  require_stopped();
  if (frame < 0 || static_cast<std::size_t>(frame) >= stack_depth()) {
    throw Error(Errc::BadFrameIndex, "no frame at index " + std::to_string(frame));
  }
  auto list = [&](const char* values) {
    Output out = driver_.send_command("-stack-list-variables" + thread_frame_options(frame) +
                                      " " + values);
    const Record& r = expect_done(out, "-stack-list-variables");
    if (r.cls == "error") throw Error(Errc::BadFrameIndex, error_message(r));
    const Value* vars = r.find("variables");
    return vars ? vars->children() : std::vector<mi::Result>{};
  };
  auto typed = list("--simple-values");
  auto valued = list("--all-values");

  std::vector<VariableBinding> bindings;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < typed.size(); ++i) {
    const Value& t = typed[i].value;
    VariableBinding b;
    b.name = t.get_text("name");
    // entry values such as "p@entry" are debugger artefacts, not variables
    if (b.name.empty() || b.name.find('@') != std::string::npos) continue;
    if (!seen.insert(b.name).second) continue;
    b.type = t.get_text("type");
    b.raw_value = i < valued.size() ? valued[i].value.get_text("value") : t.get_text("value");
    b.is_pointer = is_pointer_type(b.type);
    bindings.push_back(std::move(b));
  }
  return bindings;
}

std::optional<std::string> DebuggerSession::try_evaluate(std::string_view expression, int frame) {
  if (state_ != State::Stopped) return std::nullopt;
  Output out = driver_.send_command("-data-evaluate-expression" + thread_frame_options(frame) +
                                    " " + mi::mi_arg(expression));
  const Record* r = out.result();
  if (!r || r->cls != "done") return std::nullopt;
  return r->get_text("value");
}

std::string DebuggerSession::evaluate(std::string_view expression) {
  Output out = driver_.send_command("-data-evaluate-expression " + mi::mi_arg(expression));
  const Record& r = expect_done(out, "-data-evaluate-expression");
  if (r.cls != "done") throw Error(Errc::EvaluationError, error_message(r));
  return r.get_text("value");
}

std::vector<GlobalSymbol> DebuggerSession::global_variables(const std::vector<std::string>& names) {
  std::vector<GlobalSymbol> result;
  if (names.empty()) return result;
  std::string alternation;
  for (const auto& n : names) {
    if (!is_identifier(n)) continue;
    if (!alternation.empty()) alternation += "\\|";
    alternation += n;
  }
  if (alternation.empty()) return result;
  // the debugger takes POSIX basic regular expressions
  Output out = driver_.send_command("-symbol-info-variables --name " +
                                    mi::mi_arg("^\\(" + alternation + "\\)$"));
  const Record* r = out.result();
  if (!r || r->cls != "done") return result;
  const Value* symbols = r->find("symbols");
  const Value* debug = symbols ? symbols->find("debug") : nullptr;
  if (!debug) return result;
  for (const auto& file_entry : debug->children()) {
    std::string file = file_entry.value.get_text("fullname");
    if (file.empty()) file = file_entry.value.get_text("filename");
    const Value* syms = file_entry.value.find("symbols");
    if (!syms) continue;
    for (const auto& s : syms->children()) {
      GlobalSymbol g;
      g.name = s.value.get_text("name");
      g.type = s.value.get_text("type");
      g.file = file;
      g.line = parse_int(s.value.get_text("line")).value_or(0);
      result.push_back(std::move(g));
    }
  }
  return result;
}

std::string DebuggerSession::execute_console(std::string_view command) {
  Output out = driver_.send_command("-interpreter-exec console " + mi::mi_arg(command));
  std::string text = out.console_text();
  const Record* r = out.result();
  if (r && r->cls == "error") {
    if (!text.empty() && text.back() != '\n') text.push_back('\n');
    text += error_message(*r) + "\n";
  }
  bool resumed = (r && r->cls == "running") || out.async_exec("running") != nullptr;
  if (resumed) {
    if (const Record* stopped = out.async_exec("stopped")) {
      apply_stop(*stopped);
    } else {
      auto seen = driver_.wait_for_async("stopped", options_.run_timeout);
      for (const auto& rec : seen) {
        if (rec.kind == mi::RecordKind::ConsoleStream) text += rec.text;
      }
      apply_stop(seen.back());
    }
  } else {
    note_exits(out);
  }
  return text;
}

std::optional<SourceLoc> DebuggerSession::lookup_symbol(std::string_view name) {
  if (!is_identifier(name)) return std::nullopt;
  const std::string pattern = mi::mi_arg("^" + std::string(name) + "$");
  for (const char* command : {"-symbol-info-functions", "-symbol-info-variables",
                              "-symbol-info-types"}) {
    Output out = driver_.send_command(std::string(command) + " --name " + pattern);
    const Record* r = out.result();
    if (!r || r->cls != "done") continue;
    const Value* symbols = r->find("symbols");
    const Value* debug = symbols ? symbols->find("debug") : nullptr;
    if (!debug) continue;
    for (const auto& file_entry : debug->children()) {
      std::string file = file_entry.value.get_text("fullname");
      if (file.empty()) file = file_entry.value.get_text("filename");
      const Value* syms = file_entry.value.find("symbols");
      if (!syms || file.empty()) continue;
      for (const auto& s : syms->children()) {
        auto line = parse_int(s.value.get_text("line"));
        if (line && *line > 0) return SourceLoc{fs::path(file), *line};
      }
    }
  }
  return std::nullopt;
}

std::string DebuggerSession::captured_output() {
  return capture_ ? capture_->contents() : std::string();
}

}  // namespace dbgpilot
