#include "dbgpilot/lsp/transport.hpp"

#include <string_view>

#include "dbgpilot/errors.hpp"

namespace dbgpilot::lsp {

using nlohmann::json;

std::unique_ptr<ProcessTransport> ProcessTransport::spawn(const std::vector<std::string>& argv) {
  if (argv.empty()) throw Error(Errc::LspUnavailable, "no language server command");
  auto exe = find_executable(argv.front());
  if (!exe) throw Error(Errc::LspUnavailable, "language server not found: " + argv.front());
  std::vector<std::string> args = argv;
  args.front() = exe->string();
  try {
    return std::unique_ptr<ProcessTransport>(new ProcessTransport(ChildProcess::spawn(args)));
  } catch (const Error& e) {
    throw Error(Errc::LspUnavailable, e.what());
  }
}

void ProcessTransport::send(const json& message) {
  if (!child_.write_all(encode_frame(message.dump()))) {
    throw Error(Errc::LspTransportError, "language server closed its input");
  }
}

json ProcessTransport::receive(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto body = decoder_.next()) {
      json msg = json::parse(*body, nullptr, false);
      if (msg.is_discarded()) throw Error(Errc::LspTransportError, "invalid JSON from server");
      return msg;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw Error(Errc::Timeout, "language server did not answer in time");
    std::string chunk;
    switch (child_.read_some(chunk, left)) {
      case ChildProcess::ReadStatus::Data:
        decoder_.feed(chunk);
        break;
      case ChildProcess::ReadStatus::Eof:
        throw Error(Errc::LspTransportError, "language server exited");
      case ChildProcess::ReadStatus::Timeout:
        break;
    }
  }
}

void ProcessTransport::close() {
  child_.close_stdin();
  child_.terminate(std::chrono::milliseconds(1000));
}

namespace {

void replace_all(std::string& text, std::string_view from, std::string_view to) {
  if (from.empty()) return;
  for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

}  // namespace

PathScrubber::PathScrubber(const std::filesystem::path& root) {
  std::error_code ec;
  auto canon = std::filesystem::weakly_canonical(root, ec);
  root_ = (ec ? root : canon).string();
  while (root_.size() > 1 && root_.back() == '/') root_.pop_back();
}

std::string PathScrubber::scrub(std::string text) const {
  replace_all(text, root_, kPlaceholder);
  return text;
}

std::string PathScrubber::restore(std::string text) const {
  replace_all(text, kPlaceholder, root_);
  return text;
}

RecordingTransport::RecordingTransport(std::unique_ptr<Transport> inner,
                                       const std::filesystem::path& log,
                                       const std::filesystem::path& workspace_root)
    : inner_(std::move(inner)), log_(log), scrubber_(workspace_root) {
  if (!log_) throw Error(Errc::ConfigError, "cannot write " + log.string());
}

void RecordingTransport::record(const char* dir, const json& message) {
  json entry = {{"dir", dir}, {"msg", json::parse(scrubber_.scrub(message.dump()))}};
  log_ << entry.dump() << '\n';
  log_.flush();
}

void RecordingTransport::send(const json& message) {
  record("send", message);
  inner_->send(message);
}

json RecordingTransport::receive(std::chrono::milliseconds timeout) {
  json msg = inner_->receive(timeout);
  record("recv", msg);
  return msg;
}

void RecordingTransport::close() { inner_->close(); }

ReplayTransport::ReplayTransport(const std::filesystem::path& log,
                                 const std::filesystem::path& workspace_root) {
  std::ifstream in(log);
  if (!in) throw Error(Errc::LspTransportError, "cannot read recording " + log.string());
  PathScrubber scrubber(workspace_root);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json entry = json::parse(scrubber.restore(line), nullptr, false);
    if (entry.is_discarded() || !entry.contains("dir") || !entry.contains("msg")) {
      throw Error(Errc::LspTransportError, "bad recording line: " + line);
    }
    (entry["dir"] == "send" ? sends_ : recvs_).push_back(std::move(entry["msg"]));
  }
}

void ReplayTransport::send(const json& message) {
  if (sends_.empty()) throw Error(Errc::LspTransportError, "unexpected message: " + message.dump());
  const json& expected = sends_.front();
  auto field = [](const json& m, const char* key) { return m.contains(key) ? m[key] : json(); };
  if (field(expected, "method") != field(message, "method") ||
      field(expected, "id") != field(message, "id")) {
    throw Error(Errc::LspTransportError, "message does not match recording: expected " +
                                             expected.dump() + ", got " + message.dump());
  }
  sends_.pop_front();
}

json ReplayTransport::receive(std::chrono::milliseconds) {
  if (recvs_.empty()) throw Error(Errc::Timeout, "recording has no more server messages");
  json msg = std::move(recvs_.front());
  recvs_.pop_front();
  return msg;
}

}  // namespace dbgpilot::lsp
