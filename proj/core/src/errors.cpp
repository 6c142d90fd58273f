#include "dbgpilot/errors.hpp"

namespace dbgpilot {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DebuggerNotFound: return "DebuggerNotFound";
    case Errc::TargetNotFound: return "TargetNotFound";
    case Errc::ProtocolHandshakeFailed: return "ProtocolHandshakeFailed";
    case Errc::DebuggerExited: return "DebuggerExited";
    case Errc::Timeout: return "Timeout";
    case Errc::NotStopped: return "NotStopped";
    case Errc::BadFrameIndex: return "BadFrameIndex";
    case Errc::EvaluationError: return "EvaluationError";
    case Errc::SourceUnavailable: return "SourceUnavailable";
    case Errc::BadLocSyntax: return "BadLocSyntax";
    case Errc::SymbolNotOnLine: return "SymbolNotOnLine";
    case Errc::DefinitionNotFound: return "DefinitionNotFound";
    case Errc::LspUnavailable: return "LspUnavailable";
    case Errc::LspTransportError: return "LspTransportError";
    case Errc::LspErrorResponse: return "LspErrorResponse";
    case Errc::LspNotInitialized: return "LspNotInitialized";
    case Errc::BudgetImpossible: return "BudgetImpossible";
    case Errc::AuthError: return "AuthError";
    case Errc::TransportError: return "TransportError";
    case Errc::RateLimited: return "RateLimited";
    case Errc::MalformedToolArgs: return "MalformedToolArgs";
    case Errc::ScriptParseError: return "ScriptParseError";
    case Errc::ScriptExhausted: return "ScriptExhausted";
    case Errc::Interrupted: return "Interrupted";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace dbgpilot
