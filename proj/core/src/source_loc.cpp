#include "dbgpilot/source_loc.hpp"

#include <charconv>

#include "dbgpilot/errors.hpp"
#include "dbgpilot/text.hpp"

namespace dbgpilot {

SourceLoc SourceLoc::parse(std::string_view text) {
  std::string_view t = trim(text);
  auto colon = t.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == t.size()) {
    throw Error(Errc::BadLocSyntax, "expected filename:lineno, got '" + std::string(text) + "'");
  }
  std::string_view digits = t.substr(colon + 1);
  int line = 0;
  auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), line);
  if (ec != std::errc{} || end != digits.data() + digits.size() || line < 1) {
    throw Error(Errc::BadLocSyntax, "bad line number in '" + std::string(text) + "'");
  }
  return SourceLoc{std::filesystem::path(std::string(t.substr(0, colon))), line};
}

std::string SourceLoc::to_string() const { return file.string() + ":" + std::to_string(line); }

}  // namespace dbgpilot
