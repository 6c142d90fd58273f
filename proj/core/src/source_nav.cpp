#include "dbgpilot/source_nav.hpp"

#include <fstream>

#include "dbgpilot/enriched_stack.hpp"
#include "dbgpilot/errors.hpp"
#include "dbgpilot/text.hpp"

namespace dbgpilot {

namespace fs = std::filesystem;

std::string DefinitionResult::render() const {
  return display + ":" + std::to_string(location.line) + "\n" + listing;
}

LspFactory process_lsp_factory(std::vector<std::string> argv, fs::path workspace_root,
                               std::optional<fs::path> record_to,
                               std::chrono::milliseconds timeout) {
  return [argv = std::move(argv), root = std::move(workspace_root),
          record_to = std::move(record_to), timeout]() {
    std::unique_ptr<lsp::Transport> t = lsp::ProcessTransport::spawn(argv);
    if (record_to) t = std::make_unique<lsp::RecordingTransport>(std::move(t), *record_to, root);
    auto client = std::make_unique<lsp::LspClient>(std::move(t), root, timeout);
    client->initialize();
    return client;
  };
}

LspFactory replay_lsp_factory(fs::path recording, fs::path workspace_root) {
  return [recording = std::move(recording), root = std::move(workspace_root)]() {
    auto client = std::make_unique<lsp::LspClient>(
        std::make_unique<lsp::ReplayTransport>(recording, root), root);
    client->initialize();
    return client;
  };
}

namespace {

std::optional<std::string> read_line(const fs::path& file, int line) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  std::string text;
  for (int n = 1; std::getline(in, text); ++n) {
    if (n == line) return text;
  }
  return std::nullopt;
}

}  // namespace

SourceNavigator::SourceNavigator(fs::path workspace_root, WindowOptions window,
                                 DebugTarget* debugger, LspFactory lsp)
    : root_(std::move(workspace_root)),
      window_(window),
      debugger_(debugger),
      factory_(std::move(lsp)) {
  std::error_code ec;
  auto canon = fs::weakly_canonical(root_, ec);
  if (!ec) root_ = canon;
}

SourceNavigator::~SourceNavigator() { shutdown(); }

void SourceNavigator::shutdown() {
  if (lsp_) {
    try {
      lsp_->shutdown();
    } catch (...) {
    }
    lsp_.reset();
  }
}

fs::path SourceNavigator::resolve(const fs::path& file) const {
  fs::path p = file.is_absolute() ? file : root_ / file;
  std::error_code ec;
  auto canon = fs::weakly_canonical(p, ec);
  return ec ? p.lexically_normal() : canon;
}

std::string SourceNavigator::display_path(const fs::path& file) const {
  if (path_within(file, root_)) return file.lexically_relative(root_).string();
  return file.string();
}

lsp::LspClient* SourceNavigator::language_server() {
  if (lsp_) return lsp_.get();
  if (lsp_error_) return nullptr;
  if (!factory_) {
    lsp_error_ = "no language server configured";
    return nullptr;
  }
  try {
    lsp_ = factory_();
  } catch (const Error& e) {
    lsp_error_ = e.what();
  }
  return lsp_.get();
}

std::string SourceNavigator::code(std::string_view loc_text) {
  SourceLoc loc = SourceLoc::parse(loc_text);
  return source_window(resolve(loc.file), loc.line, window_);
}

std::optional<DefinitionResult> SourceNavigator::make_result(const fs::path& file, int line,
                                                             DefinitionSource source) const {
  try {
    DefinitionResult r;
    r.location = SourceLoc{file, line};
    r.display = display_path(file);
    r.listing = source_window(file, line, window_);
    r.source = source;
    return r;
  } catch (const Error&) {
    return std::nullopt;  // unreadable target counts as not found
  }
}

DefinitionResult SourceNavigator::definition(std::string_view loc_text, std::string_view symbol) {
  SourceLoc loc = SourceLoc::parse(loc_text);
  const fs::path file = resolve(loc.file);
  auto text = read_line(file, loc.line);
  if (!text) {
    throw Error(Errc::SourceUnavailable, "cannot read line " + std::to_string(loc.line) +
                                             " of " + display_path(file));
  }
  const std::string sym(trim(symbol));
  const auto column = find_word(*text, sym);
  if (column == std::string::npos || sym.empty()) {
    throw Error(Errc::SymbolNotOnLine, "'" + sym + "' does not occur on " + loc.to_string());
  }

  bool lsp_available = false;
  if (lsp::LspClient* server = language_server()) {
    lsp_available = true;
    try {
      auto found = server->definition(file, loc.line, static_cast<int>(column));
      // A reply pointing back at the query line means the server only saw a
      // use, as with implicit declarations.
      if (found && !(resolve(found->file) == file && found->line == loc.line)) {
        if (auto r = make_result(resolve(found->file), found->line,
                                 DefinitionSource::LanguageServer)) {
          return *r;
        }
      }
    } catch (const Error& e) {
      if (e.code() != Errc::LspErrorResponse) {
        lsp_error_ = e.what();
        lsp_.reset();
        lsp_available = false;
      }
    }
  }

  if (debugger_) {
    if (auto site = debugger_->lookup_symbol(sym)) {
      if (auto r = make_result(resolve(site->file), site->line, DefinitionSource::Debugger)) {
        return *r;
      }
    }
  }
  if (!lsp_available) {
    throw Error(Errc::LspUnavailable,
                "no definition for '" + sym + "': language server unavailable (" +
                    lsp_error_.value_or("unknown reason") + ") and debug info has none");
  }
  throw Error(Errc::DefinitionNotFound, "no definition found for '" + sym + "'");
}

}  // namespace dbgpilot
