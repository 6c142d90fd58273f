#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "dbgpilot/debugger_session.hpp"
#include "dbgpilot/llm/chat.hpp"

namespace dbgpilot {

inline constexpr std::string_view kDefaultPromptLabel = "(ChatDBG) ";

struct HistoryEntry {
  std::string command;
  std::string output;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

/// Everything that goes into the first prompt of a dialog.
///
/// The stack is kept as blocks (outermost first, crashing frame last) so it
/// can be shortened block by block. The omitted_* counters record how much
/// truncation already removed; they are rendered as notes.
struct PromptBundle {
  std::string instructions;
  std::vector<std::string> stack_blocks;
  std::string inputs;
  std::string error;
  std::vector<HistoryEntry> history;
  std::string user_text;
  std::string prompt_label = std::string(kDefaultPromptLabel);

  std::size_t omitted_history = 0;
  std::size_t omitted_stack_blocks = 0;

  friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

/// ceil(bytes / 4).
std::size_t estimate_tokens(std::string_view text);

struct TokenBudget {
  std::size_t max_tokens = 16'000;
  std::function<std::size_t(std::string_view)> estimator = estimate_tokens;

  std::size_t estimate(const std::vector<llm::ChatMessage>& messages) const;
};

/// Shortens `bundle` until its initial prompt fits: history (oldest entries
/// first), then inputs, then stack blocks (outermost first, crashing frame
/// last). Instructions, error and user text are never touched. A bundle that
/// already fits is returned unchanged. Throws Error(BudgetImpossible) when
/// the untouchable parts alone do not fit.
PromptBundle fit_to_budget(const PromptBundle& bundle, const TokenBudget& budget);

/// Renders a bundle as-is, without budget checks.
std::vector<llm::ChatMessage> render_initial_prompt(const PromptBundle& bundle);

/// System message with the instructions, then one user message with the
/// stack, inputs, error, history and user text in that order. Empty inputs
/// and history are left out.
std::vector<llm::ChatMessage> make_initial_prompt(const PromptBundle& bundle,
                                                  const TokenBudget& budget = {});

/// A single user message with the history since the last send, then the
/// user text.
std::vector<llm::ChatMessage> make_followup_prompt(
    const std::vector<HistoryEntry>& history, std::string_view user_text,
    std::string_view prompt_label = kDefaultPromptLabel);

std::string instructions_text();

/// Description of a stop for the Error section, including the
/// do-not-change sentence for assertion failures.
std::string error_section(const StopEvent& stop);

/// One-line account of why the target stopped.
std::string stop_description(const StopEvent& stop);

/// Command-line arguments and captured standard input; empty when neither
/// is available.
std::string inputs_text(const std::vector<std::string>& args, std::string_view stdin_text);

std::string history_text(const std::vector<HistoryEntry>& history, std::string_view prompt_label);

}  // namespace dbgpilot
