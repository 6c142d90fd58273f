#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dbgpilot {

std::string_view trim(std::string_view s);
std::string rtrim_copy(std::string_view s);

/// Splits on '\n', dropping a trailing empty piece and any '\r'.
std::vector<std::string_view> split_lines(std::string_view text);

/// C identifier: [A-Za-z_][A-Za-z0-9_]*
bool is_identifier(std::string_view s);
inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

/// Byte offset of the first whole-identifier occurrence of `word`.
std::string_view::size_type find_word(std::string_view text, std::string_view word);

/// Identifiers appearing in C-like source, excluding string/char literals
/// and comments, in first-appearance order without duplicates.
std::vector<std::string> identifiers_in(std::string_view source);

/// First whitespace-delimited word.
std::string_view first_word(std::string_view line);

}  // namespace dbgpilot
