#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dbgpilot {

enum class Errc {
  // debugger process and protocol
  DebuggerNotFound,
  TargetNotFound,
  ProtocolHandshakeFailed,
  DebuggerExited,
  Timeout,
  // session state
  NotStopped,
  BadFrameIndex,
  EvaluationError,
  // source access
  SourceUnavailable,
  BadLocSyntax,
  SymbolNotOnLine,
  DefinitionNotFound,
  LspUnavailable,
  LspTransportError,
  LspErrorResponse,
  LspNotInitialized,
  // prompting
  BudgetImpossible,
  // llm
  AuthError,
  TransportError,
  RateLimited,
  MalformedToolArgs,
  ScriptParseError,
  ScriptExhausted,
  Interrupted,
  // configuration
  ConfigError,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

  /// Protocol-level numeric detail: LSP error code or retry-after seconds.
  std::optional<long> detail() const noexcept { return detail_; }
  Error& with_detail(long value) {
    detail_ = value;
    return *this;
  }

 private:
  Errc code_;
  std::optional<long> detail_;
};

}  // namespace dbgpilot
