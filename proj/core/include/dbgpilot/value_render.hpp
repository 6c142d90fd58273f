#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dbgpilot/debugger_session.hpp"

namespace dbgpilot {

struct RenderedValue {
  std::string text;
  bool truncated = false;  // some element or nesting level was replaced by "..."
  int depth_reached = 1;   // deepest aggregate level whose contents are shown

  friend bool operator==(const RenderedValue&, const RenderedValue&) = default;
};

struct RenderLimits {
  std::size_t head = 3;
  std::size_t tail = 3;
  int max_depth = 3;
};

/// A debugger value rendering parsed into structure.
///
/// Chars is a character array given as string and char-literal pieces,
/// e.g. `"ab", 'x' <repeats 20 times>`; each run holds one char literal
/// such as `'x'` and its repeat count.
struct ValueNode {
  enum class Kind { Scalar, Aggregate, Chars };

  struct Element;
  struct CharRun {
    std::string literal;
    std::uint64_t count = 1;
  };

  Kind kind = Kind::Scalar;
  std::string text;
  std::vector<Element> elements;
  std::vector<CharRun> chars;

  std::uint64_t size() const;
};

struct ValueNode::Element {
  std::string name;  // empty for array items
  ValueNode value;
  std::uint64_t repeat = 1;
};

/// Parses debugger value text. Total: anything unrecognized is a Scalar
/// holding the input verbatim.
ValueNode parse_value_text(std::string_view text);

/// Renders parsed value text with the width and depth limits. `level` is
/// the nesting level the value itself sits at (1 for a variable).
RenderedValue render_value_node(const ValueNode& node, const RenderLimits& limits = {},
                                int level = 1);

inline RenderedValue render_value_text(std::string_view raw, const RenderLimits& limits = {}) {
  return render_value_node(parse_value_text(raw), limits);
}

/// Evaluates an expression in the binding's frame; nullopt on failure.
using Evaluator = std::function<std::optional<std::string>(std::string_view expression)>;

/// Renders a variable. Non-null data pointers are followed one level and
/// shown as `address → pointee`; the pointee counts as the next nesting
/// level. Null pointers, function pointers, char pointers that already show
/// their string, and failed dereferences stay as the bare address.
RenderedValue render_value(const VariableBinding& binding, const Evaluator& evaluate,
                           const RenderLimits& limits = {});

bool is_null_pointer_text(std::string_view raw);

}  // namespace dbgpilot
