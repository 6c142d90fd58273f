#include "dbgpilot/text.hpp"

#include <set>

namespace dbgpilot {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n\v\f";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string rtrim_copy(std::string_view s) {
  auto e = s.find_last_not_of(" \t\r\n\v\f");
  if (e == std::string_view::npos) return {};
  return std::string(s.substr(0, e + 1));
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s.front())) return false;
  for (char c : s) {
    if (!is_ident_char(c)) return false;
  }
  return true;
}

std::string_view::size_type find_word(std::string_view text, std::string_view word) {
  if (word.empty()) return std::string_view::npos;
  for (auto pos = text.find(word); pos != std::string_view::npos; pos = text.find(word, pos + 1)) {
    bool left_ok = pos == 0 || !is_ident_char(text[pos - 1]);
    auto end = pos + word.size();
    bool right_ok = end >= text.size() || !is_ident_char(text[end]);
    bool word_like = is_ident_char(word.front());
    if (!word_like || (left_ok && right_ok)) return pos;
  }
  return std::string_view::npos;
}

std::vector<std::string> identifiers_in(std::string_view src) {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> seen;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      auto end = src.find("*/", i + 2);
      i = end == std::string_view::npos ? src.size() : end + 2;
    } else if (c == '"' || c == '\'') {
      ++i;
      while (i < src.size() && src[i] != c) {
        if (src[i] == '\\') ++i;
        ++i;
      }
      ++i;
    } else if (is_ident_start(c)) {
      std::size_t start = i;
      while (i < src.size() && is_ident_char(src[i])) ++i;
      std::string_view id = src.substr(start, i - start);
      if (seen.find(id) == seen.end()) {
        seen.emplace(id);
        out.emplace_back(id);
      }
    } else if (c >= '0' && c <= '9') {
      while (i < src.size() && (is_ident_char(src[i]) || src[i] == '.')) ++i;
    } else {
      ++i;
    }
  }
  return out;
}

std::string_view first_word(std::string_view line) {
  line = trim(line);
  auto end = line.find_first_of(" \t");
  return line.substr(0, end);
}

}  // namespace dbgpilot
