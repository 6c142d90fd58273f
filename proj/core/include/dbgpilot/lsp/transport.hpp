#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbgpilot/lsp/framing.hpp"
#include "dbgpilot/process.hpp"

namespace dbgpilot::lsp {

/// Moves whole JSON-RPC messages to and from a language server.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const nlohmann::json& message) = 0;
  /// Throws Error(Timeout) or Error(LspTransportError).
  virtual nlohmann::json receive(std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
};

/// A server child process speaking over its stdio.
class ProcessTransport final : public Transport {
 public:
  /// Throws Error(LspUnavailable) when the executable cannot be found or
  /// started.
  static std::unique_ptr<ProcessTransport> spawn(const std::vector<std::string>& argv);

  void send(const nlohmann::json& message) override;
  nlohmann::json receive(std::chrono::milliseconds timeout) override;
  void close() override;

  pid_t pid() const noexcept { return child_.pid(); }

 private:
  explicit ProcessTransport(ChildProcess child) : child_(std::move(child)) {}

  ChildProcess child_;
  FrameDecoder decoder_;
};

/// Replaces every occurrence of the workspace path (plain and as a file URI)
/// with a placeholder, and back.
class PathScrubber {
 public:
  explicit PathScrubber(const std::filesystem::path& root);
  std::string scrub(std::string text) const;
  std::string restore(std::string text) const;

  static constexpr const char* kPlaceholder = "${WORKSPACE}";

 private:
  std::string root_;
};

/// Passes messages through and appends each to a JSON-lines file as
/// {"dir":"send"|"recv","msg":...} with workspace paths scrubbed.
class RecordingTransport final : public Transport {
 public:
  RecordingTransport(std::unique_ptr<Transport> inner, const std::filesystem::path& log,
                     const std::filesystem::path& workspace_root);

  void send(const nlohmann::json& message) override;
  nlohmann::json receive(std::chrono::milliseconds timeout) override;
  void close() override;

 private:
  void record(const char* dir, const nlohmann::json& message);

  std::unique_ptr<Transport> inner_;
  std::ofstream log_;
  PathScrubber scrubber_;
};

/// Plays back a recording. Outgoing messages must match the recorded ones
/// in method and id; incoming messages are returned in recorded order with
/// the workspace placeholder replaced by `workspace_root`.
class ReplayTransport final : public Transport {
 public:
  /// Throws Error(LspTransportError) if the file cannot be read.
  ReplayTransport(const std::filesystem::path& log, const std::filesystem::path& workspace_root);

  void send(const nlohmann::json& message) override;
  nlohmann::json receive(std::chrono::milliseconds timeout) override;
  void close() override {}

  std::size_t pending_sends() const noexcept { return sends_.size(); }

 private:
  std::deque<nlohmann::json> sends_;
  std::deque<nlohmann::json> recvs_;
};

}  // namespace dbgpilot::lsp
