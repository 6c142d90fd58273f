#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dbgpilot/debugger_session.hpp"
#include "dbgpilot/source_window.hpp"
#include "dbgpilot/value_render.hpp"

namespace dbgpilot {

struct RenderedBinding {
  std::string name;
  std::string type;
  RenderedValue value;
};

struct EnrichedFrame {
  Frame frame;
  std::string display_path;           // "./" + path relative to the workspace
  std::optional<std::string> window;  // absent when the source cannot be read
  std::vector<RenderedBinding> bindings;
  std::optional<std::vector<RenderedBinding>> globals;
};

struct ElisionMarker {
  std::size_t hidden = 0;
};

using StackEntry = std::variant<EnrichedFrame, ElisionMarker>;

/// Entries run outermost-first; the innermost shown frame comes last.
struct EnrichedStack {
  std::vector<StackEntry> entries;
  std::size_t total_frames = 0;

  std::size_t shown_frames() const;
  std::size_t hidden_frames() const;

  /// One text block per entry, in entry order, each ending in '\n'.
  std::vector<std::string> blocks() const;
  /// Blocks separated by blank lines.
  std::string render() const;
};

struct EnrichOptions {
  std::filesystem::path workspace_root = std::filesystem::current_path();
  WindowOptions window;
  RenderLimits limits;
  std::size_t max_globals = 10;
};

/// Throws Error(NotStopped) unless the target is stopped.
EnrichedStack build_enriched_stack(DebugTarget& target, const EnrichOptions& options = {});

/// True when `file` lies under `root` after normalization.
bool path_within(const std::filesystem::path& file, const std::filesystem::path& root);

std::string elision_text(std::size_t hidden);

/// Source text of the body of `function` that contains `line`, or nullopt.
std::optional<std::string> function_body(std::string_view source, std::string_view function,
                                         int line);

}  // namespace dbgpilot
