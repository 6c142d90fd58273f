#include "dbgpilot/prompt.hpp"

#include "dbgpilot/errors.hpp"
#include "dbgpilot/sanitizer.hpp"
#include "dbgpilot/text.hpp"

namespace dbgpilot {

using llm::ChatMessage;

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::size_t TokenBudget::estimate(const std::vector<ChatMessage>& messages) const {
  std::size_t total = 0;
  for (const auto& m : messages) total += estimator(m.content);
  return total;
}

std::string instructions_text() {
  std::string commands;
  for (const auto& c : command_summary()) {
    if (!commands.empty()) commands += ", ";
    commands += c;
  }
  std::string t;
  t += "You are a debugging assistant. You will be given the state of a native program "
       "that stopped with an error, and you will answer questions about what caused it.\n\n";
  t += "Use the `debug` function to run one debugger command at a time on the stopped "
       "program. The available commands are: " + commands + ". Commands that resume, "
       "restart or modify the program are refused, and so are expressions that call "
       "functions. Print any variable or expression you suspect contributes to the error.\n\n";
  t += "Use the `code` function with a location of the form filename:lineno to read the "
       "source lines around that location.\n\n";
  t += "Use the `definition` function with a location filename:lineno and a symbol name to "
       "find where the first occurrence of that symbol on that line is defined, along with "
       "the source around the definition.\n\n";
  t += "Make as many function calls as you need.\n\n";
  t += "The root cause of any error is likely due to a problem in the source code from the "
       "user. For each variable involved in the error, explain how it came to hold its "
       "value, and keep going until you reach the root cause. Your answer may be as long "
       "as it needs to be.\n\n";
  t += "Finish with a section titled \"Recommendation\" that contains either:\n"
       "- a fix, if you found the root cause, or\n"
       "- a numbered list of 1-3 suggestions for further debugging, if you did not.\n";
  return t;
}

namespace {

std::string fenced(std::string_view body) {
  std::string out = "```\n";
  out += body;
  if (!body.empty() && body.back() != '\n') out += '\n';
  out += "```";
  return out;
}

std::string where(const Frame& f) {
  std::string out = f.function.empty() ? std::string("??") : f.function;
  if (f.file && f.line) out += " at " + f.file->filename().string() + ":" + std::to_string(*f.line);
  return out;
}

std::string stack_section(const PromptBundle& b) {
  if (b.stack_blocks.empty()) return {};
  std::string body;
  if (b.omitted_stack_blocks > 0) {
    body += "[... " + std::to_string(b.omitted_stack_blocks) +
            " outer stack block(s) omitted to fit the prompt budget]\n";
  }
  for (const auto& block : b.stack_blocks) {
    if (!body.empty()) body += '\n';
    body += block;
    if (!block.empty() && block.back() != '\n') body += '\n';
  }
  return "The program has this enriched stack trace, outermost frame first:\n" + fenced(body);
}

std::string inputs_section(const PromptBundle& b) {
  if (trim(b.inputs).empty()) return {};
  return "The program was started with these inputs:\n" + fenced(b.inputs);
}

std::string history_section(const std::vector<HistoryEntry>& history, std::size_t omitted,
                            std::string_view label) {
  if (history.empty()) return {};
  std::string body;
  if (omitted > 0) {
    body += "[... " + std::to_string(omitted) + " earlier command(s) omitted]\n";
  }
  body += history_text(history, label);
  return "These are debugger commands I ran before asking, with their output:\n" + fenced(body);
}

void append_section(std::string& out, const std::string& section) {
  if (section.empty()) return;
  if (!out.empty()) out += "\n\n";
  out += section;
}

}  // namespace

std::string history_text(const std::vector<HistoryEntry>& history, std::string_view label) {
  std::string out;
  for (const auto& e : history) {
    out += std::string(label) + e.command + "\n";
    out += e.output;
    if (!e.output.empty() && e.output.back() != '\n') out += '\n';
  }
  return out;
}

std::string inputs_text(const std::vector<std::string>& args, std::string_view stdin_text) {
  std::string out;
  if (!args.empty()) {
    out += "Command-line arguments:";
    for (const auto& a : args) {
      bool plain = !a.empty() && a.find_first_of(" \t\n'\"\\") == std::string::npos;
      out += ' ';
      out += plain ? a : "'" + a + "'";
    }
    out += '\n';
  }
  if (!stdin_text.empty()) {
    out += "Standard input:\n";
    out += stdin_text;
    if (stdin_text.back() != '\n') out += '\n';
  }
  return out;
}

std::string stop_description(const StopEvent& stop) {
  std::string body;
  switch (stop.reason) {
    case StopReason::Signal:
      body = "Program received signal " + stop.signal_name.value_or("SIGUNKNOWN");
      if (stop.signal_meaning) body += " (" + *stop.signal_meaning + ")";
      if (stop.frame) body += " in " + where(*stop.frame);
      body += ".";
      break;
    case StopReason::AssertionFailure:
      body = stop.detail;
      break;
    case StopReason::Exited:
      body = stop.exit_code.value_or(0) == 0
                 ? std::string("The program exited normally.")
                 : "The program exited with code " + std::to_string(*stop.exit_code) + ".";
      break;
    case StopReason::Breakpoint:
      body = "The program stopped at a breakpoint";
      if (stop.frame) body += " in " + where(*stop.frame);
      body += ".";
      break;
    case StopReason::Other:
      body = "The program stopped (" + (stop.other_reason.empty() ? std::string("unknown reason")
                                                                   : stop.other_reason) + ")";
      if (stop.frame) body += " in " + where(*stop.frame);
      body += ".";
      break;
  }
  return body;
}

std::string error_section(const StopEvent& stop) {
  std::string out = "The program stopped because of this error:\n" + fenced(stop_description(stop));
  if (stop.reason == StopReason::AssertionFailure) {
    out += "\nThe code `assert(" + stop.assertion + ")` is correct and must not be changed.";
  }
  return out;
}

std::vector<ChatMessage> render_initial_prompt(const PromptBundle& b) {
  std::string user;
  append_section(user, stack_section(b));
  append_section(user, inputs_section(b));
  append_section(user, b.error);
  append_section(user, history_section(b.history, b.omitted_history, b.prompt_label));
  append_section(user, b.user_text);
  return {ChatMessage::system(b.instructions), ChatMessage::user(std::move(user))};
}

PromptBundle fit_to_budget(const PromptBundle& bundle, const TokenBudget& budget) {
  auto fits = [&](const PromptBundle& b) {
    return budget.estimate(render_initial_prompt(b)) <= budget.max_tokens;
  };
  if (fits(bundle)) return bundle;

  PromptBundle b = bundle;
  while (!b.history.empty() && !fits(b)) {
    b.history.erase(b.history.begin());
    ++b.omitted_history;
  }
  if (!b.inputs.empty() && !fits(b)) b.inputs.clear();
  while (!b.stack_blocks.empty() && !fits(b)) {
    b.stack_blocks.erase(b.stack_blocks.begin());
    ++b.omitted_stack_blocks;
  }
  if (!fits(b)) {
    throw Error(Errc::BudgetImpossible,
                "instructions, error and question need " +
                    std::to_string(budget.estimate(render_initial_prompt(b))) +
                    " tokens but the budget is " + std::to_string(budget.max_tokens));
  }
  return b;
}

std::vector<ChatMessage> make_initial_prompt(const PromptBundle& bundle,
                                             const TokenBudget& budget) {
  return render_initial_prompt(fit_to_budget(bundle, budget));
}

std::vector<ChatMessage> make_followup_prompt(const std::vector<HistoryEntry>& history,
                                              std::string_view user_text,
                                              std::string_view prompt_label) {
  std::string text;
  append_section(text, history_section(history, 0, prompt_label));
  append_section(text, std::string(user_text));
  return {ChatMessage::user(std::move(text))};
}

}  // namespace dbgpilot
