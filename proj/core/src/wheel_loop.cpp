#include "dbgpilot/wheel_loop.hpp"

#include <regex>

#include "dbgpilot/errors.hpp"
#include "dbgpilot/interrupt.hpp"
#include "dbgpilot/text.hpp"

namespace dbgpilot {

using nlohmann::json;
using llm::ChatMessage;
using llm::ToolCallRequest;

const std::set<std::string, std::less<>>& debugger_command_words() {
  static const std::set<std::string, std::less<>> words = {
      // inspection
      "bt", "backtrace", "where", "up", "down", "frame", "f", "p", "print", "inspect", "output",
      "call", "list", "l", "info", "i", "x", "ptype", "whatis", "display", "undisplay", "printf",
      "echo", "disassemble", "explore", "help", "h", "apropos", "show", "set", "thread", "threads",
      "pwd", "dir", "directory", "search", "forward-search", "reverse-search",
      // execution control
      "run", "r", "start", "continue", "c", "next", "n", "step", "s", "stepi", "si", "nexti",
      "ni", "finish", "fin", "until", "u", "advance", "jump", "kill", "signal", "return",
      // breakpoints
      "break", "b", "tbreak", "rbreak", "delete", "d", "clear", "disable", "enable", "watch",
      "rwatch", "awatch", "catch", "condition", "ignore", "commands", "handle",
      // local tools
      "code", "definition"};
  return words;
}

bool is_debugger_command(std::string_view line) {
  std::string_view trimmed = trim(line);
  if (trimmed.empty()) return false;
  return debugger_command_words().count(command_word(trimmed)) > 0;
}

std::string tidy_print_output(std::string_view command, std::string_view output) {
  const std::string_view word = command_word(trim(command));
  if (word != "p" && word != "print" && word != "inspect" && word != "call") {
    return std::string(output);
  }
  static const std::regex history_prefix(R"(^\$\d+ = )");
  return std::regex_replace(std::string(output), history_prefix, "",
                            std::regex_constants::format_first_only);
}

Transcript::Transcript(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw Error(Errc::ConfigError, "cannot write transcript " + path.string());
}

void Transcript::write(const json& entry) {
  if (!out_.is_open()) return;
  out_ << entry.dump() << '\n';
  out_.flush();
}

void AssistantPrinter::put(std::string_view text) {
  if (text.empty()) return;
  out_ << text;
  out_.flush();
  wrote_ = true;
  at_line_start_ = text.back() == '\n';
  blank_before_ = text.size() >= 2 && text.substr(text.size() - 2) == "\n\n";
}

void AssistantPrinter::begin_block() {
  if (!wrote_) return;
  if (!at_line_start_) put("\n");
  if (!blank_before_) put("\n");
}

void AssistantPrinter::prose(std::string_view text) {
  if (text.empty()) return;
  put(text);
}

void AssistantPrinter::echo(std::string_view command, std::string_view output) {
  begin_block();
  std::string block = "→ " + std::string(command) + "\n";
  for (const auto& line : split_lines(output)) {
    if (!line.empty()) block += "  ";
    block += line;
    block += '\n';
  }
  block += "\n";
  put(block);
}

void AssistantPrinter::notice(std::string_view text) {
  begin_block();
  put("[" + std::string(text) + "]\n\n");
}

void AssistantPrinter::finish() {
  if (wrote_ && !at_line_start_) put("\n");
}

std::string_view to_string(TurnEnd end) {
  switch (end) {
    case TurnEnd::Done: return "done";
    case TurnEnd::ToolCap: return "tool_cap";
    case TurnEnd::Error: return "error";
    case TurnEnd::Interrupted: return "interrupted";
  }
  return "unknown";
}

WheelLoop::WheelLoop(DebugTarget& target, llm::Backend& backend, SourceNavigator& nav,
                     SanitizerPolicy policy, WheelOptions options, std::ostream& out,
                     Transcript* transcript)
    : target_(target),
      backend_(backend),
      nav_(nav),
      policy_(std::move(policy)),
      options_(std::move(options)),
      printer_(out),
      out_(out),
      transcript_(transcript),
      tools_(llm::default_tools()) {}

void WheelLoop::log(const json& entry) {
  if (transcript_) transcript_->write(entry);
}

std::string WheelLoop::run_local_command(std::string_view line) {
  std::string_view rest = trim(line);
  const std::string word(first_word(rest));
  rest = trim(rest.substr(word.size()));
  if (word == "code") {
    if (rest.empty()) throw Error(Errc::BadLocSyntax, "usage: code <file>:<line>");
    return nav_.code(rest);
  }
  const std::string loc(first_word(rest));
  std::string_view symbol = trim(rest.substr(loc.size()));
  if (loc.empty() || symbol.empty()) {
    throw Error(Errc::BadLocSyntax, "usage: definition <file>:<line> <symbol>");
  }
  return nav_.definition(loc, symbol).render();
}

void WheelLoop::run_user_command(std::string_view line) {
  const std::string command(trim(line));
  const std::string_view word = command_word(command);
  std::string output;
  try {
    if (word == "code" || word == "definition") {
      output = run_local_command(command);
    } else {
      output = tidy_print_output(command, target_.execute_console(command));
    }
  } catch (const Error& e) {
    output = std::string("error: ") + e.what() + "\n";
  }
  if (!output.empty() && output.back() != '\n') output += '\n';
  out_ << output;
  out_.flush();
  history_.push_back({command, output});
  log({{"type", "command"}, {"command", command}, {"output", output}});
}

std::vector<ChatMessage> WheelLoop::build_prompt(std::string_view user_text) {
  if (chat_in_progress_) {
    return make_followup_prompt(history_, user_text, options_.prompt_label);
  }
  PromptBundle bundle;
  bundle.instructions = instructions_text();
  if (target_.is_stopped()) bundle.stack_blocks = build_enriched_stack(target_, options_.enrich).blocks();
  bundle.inputs = inputs_text(target_.target_args(), options_.stdin_text);
  bundle.error = error_section(target_.last_stop());
  bundle.history = history_;
  bundle.user_text = std::string(user_text);
  bundle.prompt_label = options_.prompt_label;
  return make_initial_prompt(bundle, options_.budget);
}

void WheelLoop::handle_input(std::string_view line) {
  const std::string_view text = trim(line);
  if (text.empty()) return;
  log({{"type", "input"}, {"line", std::string(text)}});
  if (is_debugger_command(text)) {
    run_user_command(text);
    return;
  }
  std::vector<ChatMessage> prompt;
  try {
    prompt = build_prompt(text);
  } catch (const Error& e) {
    out_ << "error: " << e.what() << "\n";
    log({{"type", "error"}, {"code", std::string(to_string(e.code()))}, {"message", e.what()}});
    return;
  }
  run_chat_turn(std::move(prompt));
}

std::string WheelLoop::execute_tool(const ToolCallRequest& call, bool& denied) {
  denied = false;
  try {
    if (call.name == "debug") {
      const std::string command = call.arguments.at("command").get<std::string>();
      Verdict v = sanitize(command, policy_);
      if (!v.allowed) {
        denied = true;
        return "The command was not run: " + v.reason + ".";
      }
      return tidy_print_output(command, target_.execute_console(command));
    }
    if (call.name == "code") {
      return nav_.code(call.arguments.at("loc").get<std::string>());
    }
    if (call.name == "definition") {
      return nav_
          .definition(call.arguments.at("loc").get<std::string>(),
                      call.arguments.at("symbol").get<std::string>())
          .render();
    }
    return "error: unknown function '" + call.name + "'";
  } catch (const Error& e) {
    return std::string("error: ") + e.what();
  } catch (const json::exception& e) {
    return std::string("error: bad arguments: ") + e.what();
  }
}

namespace {

std::string display_command(const ToolCallRequest& call) {
  auto arg = [&](const char* key) {
    auto it = call.arguments.find(key);
    return it != call.arguments.end() && it->is_string() ? it->get<std::string>() : std::string();
  };
  if (call.name == "debug") return arg("command");
  if (call.name == "code") return "code " + arg("loc");
  if (call.name == "definition") return "definition " + arg("loc") + " " + arg("symbol");
  return call.name + " " + call.raw_arguments;
}

}  // namespace

TurnResult WheelLoop::run_chat_turn(std::vector<ChatMessage> prompt) {
  TurnResult result;
  json wire = json::array();
  for (const auto& m : prompt) wire.push_back(llm::to_wire(m));
  log({{"type", "prompt"}, {"messages", wire}});

  history_.clear();  // what was typed so far is now in the prompt
  chat_in_progress_ = true;
  ++turn_count_;
  for (auto& m : prompt) messages_.push_back(std::move(m));

  for (;;) {
    if (interrupt_requested()) {
      result.end = TurnEnd::Interrupted;
      break;
    }
    std::string text;
    std::vector<ToolCallRequest> calls;
    std::vector<std::optional<std::string>> malformed;
    try {
      backend_.complete(messages_, tools_, options_.model, [&](const llm::CompletionEvent& ev) {
        if (auto* d = std::get_if<llm::TextDelta>(&ev)) {
          text += d->text;
          printer_.prose(d->text);
        } else if (auto* c = std::get_if<llm::ToolCallEvent>(&ev)) {
          calls.push_back(c->call);
          malformed.emplace_back();
        } else if (auto* m = std::get_if<llm::MalformedToolCall>(&ev)) {
          calls.push_back(m->call);
          malformed.emplace_back(m->error);
        }
      });
    } catch (const Error& e) {
      result.end = e.code() == Errc::Interrupted ? TurnEnd::Interrupted : TurnEnd::Error;
      result.error = e.what();
      if (!text.empty()) log({{"type", "text"}, {"text", text}});
      result.text += text;
      break;
    }
    result.text += text;
    log({{"type", "text"}, {"text", text}});
    messages_.push_back(ChatMessage::assistant(text, calls));
    if (calls.empty()) break;

    for (std::size_t i = 0; i < calls.size(); ++i) {
      const ToolCallRequest& call = calls[i];
      log({{"type", "tool_call"},
           {"id", call.id},
           {"name", call.name},
           {"arguments", malformed[i] ? json(call.raw_arguments) : call.arguments}});
      std::string output;
      bool denied = false;
      bool executed = false;
      if (result.end == TurnEnd::ToolCap || result.end == TurnEnd::Interrupted) {
        output = "The command was not run: the turn was stopped.";
      } else if (interrupt_requested()) {
        result.end = TurnEnd::Interrupted;
        output = "The command was not run: the turn was stopped.";
      } else if (result.tool_calls >= options_.tool_call_cap) {
        result.end = TurnEnd::ToolCap;
        output = "The command was not run: the limit of " +
                 std::to_string(options_.tool_call_cap) + " function calls per turn was reached.";
      } else if (malformed[i]) {
        ++result.tool_calls;
        executed = true;
        output = "error: " + *malformed[i];
      } else {
        ++result.tool_calls;
        executed = true;
        output = execute_tool(call, denied);
      }
      if (executed) printer_.echo(display_command(call), output);
      messages_.push_back(ChatMessage::tool(call.id, output));
      log({{"type", "tool_result"},
           {"id", call.id},
           {"executed", executed},
           {"denied", denied},
           {"output", output}});
    }
    if (result.end != TurnEnd::Done) break;
  }

  switch (result.end) {
    case TurnEnd::Done:
      break;
    case TurnEnd::ToolCap:
      printer_.notice("stopped: the model asked for more than " +
                      std::to_string(options_.tool_call_cap) + " function calls in one turn");
      break;
    case TurnEnd::Interrupted:
      printer_.notice("interrupted");
      break;
    case TurnEnd::Error:
      printer_.notice("error: " + result.error);
      break;
  }
  printer_.finish();
  if (result.end == TurnEnd::Interrupted) clear_interrupt();
  log({{"type", "turn_end"},
       {"turn", turn_count_},
       {"reason", std::string(to_string(result.end))},
       {"tool_calls", result.tool_calls}});
  return result;
}

}  // namespace dbgpilot
