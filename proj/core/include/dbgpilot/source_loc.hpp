#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace dbgpilot {

/// A `filename:lineno` source position.
struct SourceLoc {
  std::filesystem::path file;
  int line = 1;

  /// Parses "filename:lineno"; throws Error(BadLocSyntax).
  static SourceLoc parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

}  // namespace dbgpilot
