#pragma once

#include <filesystem>
#include <string>

namespace dbgpilot {

struct WindowOptions {
  int lines = 10;  // total lines shown when the file is long enough
};

/// Numbered listing of `lines` lines around `line`, clamped to the file.
/// The current line is prefixed with "---> ", the others with five spaces;
/// line numbers are right-aligned. Throws Error(SourceUnavailable) when the
/// file cannot be read or has no such line.
std::string source_window(const std::filesystem::path& file, int line,
                          const WindowOptions& options = {});

/// First and last line shown for a file of `file_lines` lines.
std::pair<int, int> window_bounds(int line, int file_lines, int window_lines);

}  // namespace dbgpilot
