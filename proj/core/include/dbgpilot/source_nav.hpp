#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dbgpilot/debugger_session.hpp"
#include "dbgpilot/lsp/client.hpp"
#include "dbgpilot/source_loc.hpp"
#include "dbgpilot/source_window.hpp"

namespace dbgpilot {

enum class DefinitionSource { LanguageServer, Debugger };

struct DefinitionResult {
  SourceLoc location;          // absolute file, 1-based line
  std::string display;         // workspace-relative when possible
  std::string listing;         // source window around the definition
  DefinitionSource source = DefinitionSource::LanguageServer;

  /// The text handed back to the model.
  std::string render() const;
};

/// Produces a started client, or throws Error(LspUnavailable).
using LspFactory = std::function<std::unique_ptr<lsp::LspClient>()>;

/// Factory that spawns `argv` (clangd by default) rooted at `workspace_root`,
/// optionally recording traffic to `record_to`.
LspFactory process_lsp_factory(std::vector<std::string> argv,
                               std::filesystem::path workspace_root,
                               std::optional<std::filesystem::path> record_to = std::nullopt,
                               std::chrono::milliseconds timeout = std::chrono::seconds(10));

/// Factory that replays a recorded session.
LspFactory replay_lsp_factory(std::filesystem::path recording,
                              std::filesystem::path workspace_root);

/// The `code` and `definition` tools.
class SourceNavigator {
 public:
  /// `debugger` may be null; `lsp` may be empty. The language server is
  /// started on first use and a failed start disables it for the session.
  SourceNavigator(std::filesystem::path workspace_root, WindowOptions window,
                  DebugTarget* debugger, LspFactory lsp);
  ~SourceNavigator();

  SourceNavigator(const SourceNavigator&) = delete;
  SourceNavigator& operator=(const SourceNavigator&) = delete;

  /// Source window around `loc_text`. Throws Error(BadLocSyntax) or
  /// Error(SourceUnavailable).
  std::string code(std::string_view loc_text);

  /// Definition of the first whole-word occurrence of `symbol` on the line
  /// at `loc_text`. Asks the language server first and the debugger's
  /// symbol table second. Throws Error(BadLocSyntax),
  /// Error(SourceUnavailable), Error(SymbolNotOnLine),
  /// Error(DefinitionNotFound), or Error(LspUnavailable) when the server is
  /// unavailable and the fallback also failed.
  DefinitionResult definition(std::string_view loc_text, std::string_view symbol);

  /// Absolute path for a location's file, resolved against the workspace.
  std::filesystem::path resolve(const std::filesystem::path& file) const;

  /// Reason the language server is unusable, once known.
  const std::optional<std::string>& lsp_error() const noexcept { return lsp_error_; }

  void shutdown();

 private:
  lsp::LspClient* language_server();
  std::string display_path(const std::filesystem::path& file) const;
  std::optional<DefinitionResult> make_result(const std::filesystem::path& file, int line,
                                              DefinitionSource source) const;

  std::filesystem::path root_;
  WindowOptions window_;
  DebugTarget* debugger_;
  LspFactory factory_;
  std::unique_ptr<lsp::LspClient> lsp_;
  std::optional<std::string> lsp_error_;
};

}  // namespace dbgpilot
