#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dbgpilot::mi {

struct Result;

/// A machine-interface value: a c-string constant, a tuple `{...}` or a
/// list `[...]`.
///
/// Tuple and list items are stored as `Result`s. Tuple items normally carry
/// a name; list items either all carry names (`[frame={..},frame={..}]`) or
/// none do (`["a","b"]`). An empty name means a bare value, which also
/// covers the debugger's occasional nameless tuple members.
class Value {
 public:
  enum class Kind { Const, Tuple, List };

  Value() = default;

  static Value make_const(std::string text);
  static Value make_tuple(std::vector<Result> fields);
  static Value make_list(std::vector<Result> items);

  Kind kind() const noexcept { return kind_; }
  bool is_const() const noexcept { return kind_ == Kind::Const; }
  bool is_tuple() const noexcept { return kind_ == Kind::Tuple; }
  bool is_list() const noexcept { return kind_ == Kind::List; }

  /// Unescaped text of a Const; empty for aggregates.
  const std::string& text() const noexcept { return text_; }
  /// Fields of a tuple or items of a list, in received order.
  const std::vector<Result>& children() const noexcept { return children_; }

  /// First child named `name`, or nullptr.
  const Value* find(std::string_view name) const;
  /// Text of the child `name` if it is a Const, else `fallback`.
  std::string get_text(std::string_view name, std::string_view fallback = {}) const;

  friend bool operator==(const Value& a, const Value& b);

 private:
  Kind kind_ = Kind::Const;
  std::string text_;
  std::vector<Result> children_;
};

struct Result {
  std::string name;
  Value value;

  friend bool operator==(const Result& a, const Result& b) {
    return a.name == b.name && a.value == b.value;
  }
};

/// Quotes and escapes text as a machine-interface c-string.
std::string quote_cstring(std::string_view text);

/// Serializes a value in machine-interface syntax.
std::string to_mi(const Value& value);

}  // namespace dbgpilot::mi
