#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "dbgpilot/lsp/transport.hpp"

namespace dbgpilot::lsp {

/// A location returned by the server, with a 1-based line.
struct Location {
  std::filesystem::path file;
  int line = 0;
  int column = 0;  // 0-based
};

std::string path_to_uri(const std::filesystem::path& p);
/// Returns nullopt for anything but a file URI.
std::optional<std::filesystem::path> uri_to_path(std::string_view uri);

/// Parses a definition reply (Location, Location[], LocationLink[] or null)
/// and returns the first location.
std::optional<Location> first_location(const nlohmann::json& result);

/// Minimal JSON-RPC client for a language server.
class LspClient {
 public:
  LspClient(std::unique_ptr<Transport> transport, std::filesystem::path workspace_root,
            std::chrono::milliseconds timeout = std::chrono::seconds(10));
  ~LspClient();

  LspClient(const LspClient&) = delete;
  LspClient& operator=(const LspClient&) = delete;

  /// Performs the initialize/initialized handshake. Returns the server
  /// capabilities.
  nlohmann::json initialize();
  bool initialized() const noexcept { return initialized_; }

  /// Sends a request and waits for its response. Server requests that
  /// arrive meanwhile are answered with a null result and notifications are
  /// dropped. Throws Error(LspNotInitialized), Error(Timeout),
  /// Error(LspTransportError) or Error(LspErrorResponse).
  nlohmann::json request(const std::string& method, nlohmann::json params);
  void notify(const std::string& method, nlohmann::json params);

  /// Sends didOpen once per file. Throws Error(SourceUnavailable).
  void open_document(const std::filesystem::path& file);

  /// Definition of the symbol at `line` (1-based) and `column` (0-based).
  std::optional<Location> definition(const std::filesystem::path& file, int line, int column);

  /// shutdown request plus exit notification. Safe to call twice.
  void shutdown();

 private:
  nlohmann::json await_response(long id, const std::string& method);

  std::unique_ptr<Transport> transport_;
  std::filesystem::path root_;
  std::chrono::milliseconds timeout_;
  bool initialized_ = false;
  bool shut_down_ = false;
  long next_id_ = 1;
  std::set<std::string> opened_;
};

}  // namespace dbgpilot::lsp
