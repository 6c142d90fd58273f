#include "dbgpilot/repl.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "dbgpilot/debugger_session.hpp"
#include "dbgpilot/enriched_stack.hpp"
#include "dbgpilot/errors.hpp"
#include "dbgpilot/interrupt.hpp"
#include "dbgpilot/llm/openai.hpp"
#include "dbgpilot/llm/scripted.hpp"
#include "dbgpilot/prompt.hpp"
#include "dbgpilot/sanitizer.hpp"
#include "dbgpilot/source_nav.hpp"
#include "dbgpilot/text.hpp"
#include "dbgpilot/wheel_loop.hpp"

namespace dbgpilot {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Error description followed by the innermost user frame and its source.
// That frame also becomes the selected one, so that commands typed first
// see the user's variables rather than a library routine's.
std::string stop_report(DebugTarget& target, const EnrichOptions& enrich) {
  std::string out = stop_description(target.last_stop()) + "\n";
  if (!target.is_stopped()) return out;
  EnrichedStack stack = build_enriched_stack(target, enrich);
  for (auto it = stack.entries.rbegin(); it != stack.entries.rend(); ++it) {
    if (const auto* f = std::get_if<EnrichedFrame>(&*it)) {
      out += "\n> " + f->display_path + "(" + std::to_string(f->frame.line.value_or(0)) + ")" +
             f->frame.function + "()\n";
      if (f->window) out += *f->window;
      if (f->frame.index > 0) target.execute_console("frame " + std::to_string(f->frame.index));
      break;
    }
  }
  return out;
}

bool is_quit(std::string_view line) {
  line = trim(line);
  return line == "quit" || line == "q" || line == "exit";
}

}  // namespace

int run_repl(const ReplConfig& config, std::istream& in, std::ostream& out, std::ostream& err,
             bool echo_input) {
  std::unique_ptr<llm::Backend> backend;
  std::optional<SanitizerPolicy> policy;
  std::string stdin_text;
  std::unique_ptr<Transcript> transcript;
  try {
    if (config.script) {
      backend = std::make_unique<llm::ScriptedBackend>(llm::ScriptedBackend::from_file(*config.script));
    } else {
      const char* key = std::getenv(config.api_key_env.c_str());
      if (!key || !*key) {
        throw Error(Errc::AuthError, "no API key: set the " + config.api_key_env +
                                         " environment variable or pass --script");
      }
      backend = std::make_unique<llm::RemoteBackend>(
          llm::RemoteOptions{config.base_url, config.api_key_env});
    }
    std::optional<std::set<std::string, std::less<>>> allowed;
    if (config.whitelist) allowed = SanitizerPolicy::load_whitelist(*config.whitelist);
    policy = SanitizerPolicy::from_flags(config.unsafe, std::move(allowed));
    if (config.stdin_path) stdin_text = read_all(*config.stdin_path);
    transcript = config.log ? std::make_unique<Transcript>(*config.log) : std::make_unique<Transcript>();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitStartup;
  }

  SessionOptions session_options;
  session_options.driver.debugger = config.debugger;
  session_options.driver.command_timeout = config.timeout;
  session_options.driver.transcript_path = config.mi_log;
  session_options.stdin_path = config.stdin_path;

  std::optional<DebuggerSession> session;
  EnrichOptions enrich;
  enrich.workspace_root = config.workspace_root;
  enrich.window.lines = config.window;
  try {
    session.emplace(DebuggerSession::launch(config.target, config.target_args, session_options));
    session->run_to_stop();
    transcript->write({{"type", "session"},
                       {"target", config.target.filename().string()},
                       {"args", config.target_args},
                       {"backend", backend->describe()},
                       {"model", config.model},
                       {"temperature", config.temperature ? json(*config.temperature) : json()},
                       {"sanitizer", std::string(to_string(policy->mode()))},
                       {"tool_call_cap", config.tool_call_cap},
                       {"budget", config.budget}});
    const std::string report = stop_report(*session, enrich);
    out << report << "\n";
    out.flush();
    transcript->write({{"type", "stop"}, {"report", report}});
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (session) session->shutdown();
    return kExitStartup;
  }

  LspFactory lsp;
  if (!config.no_lsp) {
    lsp = process_lsp_factory({config.clangd, "--log=error"}, config.workspace_root, config.lsp_log);
  }
  SourceNavigator nav(config.workspace_root, enrich.window, &*session, std::move(lsp));

  WheelOptions options;
  options.tool_call_cap = config.tool_call_cap;
  options.budget.max_tokens = config.budget;
  options.model.model = config.model;
  options.model.temperature = config.temperature;
  options.enrich = enrich;
  options.stdin_text = stdin_text;
  WheelLoop loop(*session, *backend, nav, *policy, options, out, transcript.get());

  std::string line;
  for (;;) {
    out << options.prompt_label;
    out.flush();
    if (!std::getline(in, line)) {
      if (interrupt_requested() && !in.eof()) {
        clear_interrupt();
        in.clear();
        out << "\n";
        continue;
      }
      out << "\n";
      break;
    }
    if (echo_input) out << line << "\n";
    if (is_quit(line)) break;
    clear_interrupt();
    try {
      loop.handle_input(line);
    } catch (const std::exception& e) {
      out << "error: " << e.what() << "\n";
    }
  }
  out.flush();
  nav.shutdown();
  session->shutdown();
  return kExitOk;
}

}  // namespace dbgpilot
