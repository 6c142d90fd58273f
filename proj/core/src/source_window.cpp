#include "dbgpilot/source_window.hpp"

#include <algorithm>
#include <fstream>
#include <vector>

#include "dbgpilot/errors.hpp"
#include "dbgpilot/text.hpp"

namespace dbgpilot {

std::pair<int, int> window_bounds(int line, int file_lines, int window_lines) {
  window_lines = std::max(window_lines, 1);
  int first = line - window_lines / 2;
  int last = first + window_lines - 1;
  if (first < 1) {
    first = 1;
    last = std::min(file_lines, window_lines);
  }
  if (last > file_lines) {
    last = file_lines;
    first = std::max(1, file_lines - window_lines + 1);
  }
  return {first, last};
}

std::string source_window(const std::filesystem::path& file, int line,
                          const WindowOptions& options) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::SourceUnavailable, "cannot read " + file.string());
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(std::move(l));
  const int count = static_cast<int>(lines.size());
  if (line < 1 || line > count) {
    throw Error(Errc::SourceUnavailable,
                file.string() + " has no line " + std::to_string(line));
  }
  auto [first, last] = window_bounds(line, count, options.lines);
  const std::size_t width = std::to_string(last).size();
  std::string out;
  for (int n = first; n <= last; ++n) {
    std::string number = std::to_string(n);
    std::string row = (n == line ? "---> " : "     ") + std::string(width - number.size(), ' ') +
                      number + ' ' + lines[static_cast<std::size_t>(n - 1)];
    out += rtrim_copy(row);
    out += '\n';
  }
  return out;
}

}  // namespace dbgpilot
