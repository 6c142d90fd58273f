#include "dbgpilot/value_render.hpp"

#include <algorithm>
#include <charconv>

#include "dbgpilot/text.hpp"

namespace dbgpilot {

std::uint64_t ValueNode::size() const {
  std::uint64_t n = 0;
  if (kind == Kind::Aggregate) {
    for (const auto& e : elements) n += e.repeat;
  } else if (kind == Kind::Chars) {
    for (const auto& r : chars) n += r.count;
  }
  return n;
}

namespace {

constexpr std::string_view kArrow = " → ";

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  ValueNode parse_top() {
    std::string_view t = trim(s_);
    if (t.empty()) return scalar(std::string(t));
    s_ = t;
    pos_ = 0;
    std::vector<ValueNode::Element> items;
    if (!parse_items(items, /*closing=*/'\0') || pos_ != s_.size()) return scalar(std::string(t));
    if (items.size() == 1 && items[0].name.empty() && items[0].repeat == 1) {
      return std::move(items[0].value);
    }
    // a bare comma list only occurs for character arrays
    ValueNode chars;
    chars.kind = ValueNode::Kind::Chars;
    for (auto& item : items) {
      if (!item.name.empty() || item.value.kind != ValueNode::Kind::Chars) {
        return scalar(std::string(t));
      }
      append_chars(chars, item.value);
    }
    return chars;
  }

 private:
  static ValueNode scalar(std::string text) {
    ValueNode n;
    n.text = std::move(text);
    return n;
  }

  static void append_chars(ValueNode& into, const ValueNode& piece) {
    into.chars.insert(into.chars.end(), piece.chars.begin(), piece.chars.end());
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  void skip_ws() {
    while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\n' || s_[pos_] == '\t')) ++pos_;
  }

  // Parses comma-separated items up to `closing` (or end of input when
  // closing is '\0'). The closing character itself is not consumed.
  bool parse_items(std::vector<ValueNode::Element>& items, char closing) {
    skip_ws();
    if (peek() == closing && closing != '\0') return true;
    for (;;) {
      skip_ws();
      ValueNode::Element e;
      if (!parse_item(e)) return false;
      bool continues_chars = e.name.empty() && e.value.kind == ValueNode::Kind::Chars &&
                             !items.empty() && !items.back().name.empty() &&
                             items.back().value.kind == ValueNode::Kind::Chars;
      if (continues_chars) {
        append_chars(items.back().value, e.value);
      } else {
        items.push_back(std::move(e));
      }
      skip_ws();
      if (at_end()) return closing == '\0';
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      return peek() == closing;
    }
  }

  bool parse_name(std::string& name) {
    std::size_t p = pos_;
    if (p < s_.size() && is_ident_start(s_[p])) {
      while (p < s_.size() && is_ident_char(s_[p])) ++p;
    } else if (p < s_.size() && s_[p] == '[') {
      auto close = s_.find(']', p);
      if (close == std::string_view::npos) return false;
      p = close + 1;
    } else {
      return false;
    }
    if (s_.substr(p, 3) != " = ") return false;
    name = std::string(s_.substr(pos_, p - pos_));
    pos_ = p + 3;
    return true;
  }

  bool parse_item(ValueNode::Element& e) {
    parse_name(e.name);
    skip_ws();
    const std::size_t start = pos_;
    char c = peek();
    if (c == '{') {
      ++pos_;
      ValueNode agg;
      agg.kind = ValueNode::Kind::Aggregate;
      if (parse_items(agg.elements, '}') && peek() == '}') {
        ++pos_;
        std::size_t after = pos_;
        skip_ws();
        if (at_end() || peek() == ',' || peek() == '}') {
          e.value = std::move(agg);
          return true;
        }
        pos_ = after;
      }
      // forms such as `{int (int)} 0x401136 <walk>`
      pos_ = start;
      return parse_scalar(e);
    }
    if (c == '"' || c == '\'') {
      std::size_t save = pos_;
      if (parse_char_piece(e)) return true;
      pos_ = save;
    }
    return parse_scalar(e);
  }

  bool parse_char_piece(ValueNode::Element& e) {
    ValueNode n;
    n.kind = ValueNode::Kind::Chars;
    if (peek() == '\'') {
      std::string lit;
      if (!read_char_literal(lit)) return false;
      std::uint64_t count = 1;
      read_repeats(count);
      n.chars.push_back({std::move(lit), count});
    } else {
      ++pos_;  // opening quote
      for (;;) {
        if (at_end()) return false;
        char c = s_[pos_];
        if (c == '"') {
          ++pos_;
          break;
        }
        std::string body;
        if (c == '\\') {
          if (pos_ + 1 >= s_.size()) return false;
          char esc = s_[pos_ + 1];
          if (esc >= '0' && esc <= '7') {
            std::size_t p = pos_ + 1;
            while (p < s_.size() && p < pos_ + 4 && s_[p] >= '0' && s_[p] <= '7') ++p;
            body = std::string(s_.substr(pos_, p - pos_));
            pos_ = p;
          } else {
            body = esc == '"' ? std::string("\"") : std::string(s_.substr(pos_, 2));
            pos_ += 2;
          }
        } else if (c == '\'') {
          body = "\\'";
          ++pos_;
        } else {
          body = std::string(1, c);
          ++pos_;
        }
        n.chars.push_back({"'" + body + "'", 1});
      }
      if (s_.substr(pos_, 3) == "...") pos_ += 3;
    }
    std::size_t save = pos_;
    skip_ws();
    if (!(at_end() || peek() == ',' || peek() == '}')) return false;
    pos_ = save;
    e.value = std::move(n);
    return true;
  }

  bool read_char_literal(std::string& out) {
    std::size_t p = pos_ + 1;
    while (p < s_.size() && s_[p] != '\'') {
      if (s_[p] == '\\') ++p;
      ++p;
    }
    if (p >= s_.size()) return false;
    out = std::string(s_.substr(pos_, p + 1 - pos_));
    pos_ = p + 1;
    return out.size() >= 3;
  }

  void read_repeats(std::uint64_t& count) {
    constexpr std::string_view kOpen = " <repeats ";
    if (s_.substr(pos_, kOpen.size()) != kOpen) return;
    std::size_t p = pos_ + kOpen.size();
    std::uint64_t n = 0;
    auto [end, ec] = std::from_chars(s_.data() + p, s_.data() + s_.size(), n);
    if (ec != std::errc{}) return;
    std::string_view rest = s_.substr(static_cast<std::size_t>(end - s_.data()));
    constexpr std::string_view kClose = " times>";
    if (rest.substr(0, kClose.size()) != kClose) return;
    count = n;
    pos_ = static_cast<std::size_t>(end - s_.data()) + kClose.size();
  }

  bool parse_scalar(ValueNode::Element& e) {
    const std::size_t start = pos_;
    int depth = 0;
    char quote = '\0';
    while (!at_end()) {
      char c = s_[pos_];
      if (quote) {
        if (c == '\\') {
          ++pos_;
        } else if (c == quote) {
          quote = '\0';
        }
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '(' || c == '[' || c == '<' || c == '{') {
        ++depth;
      } else if (c == ')' || c == ']' || c == '>' || c == '}') {
        if (depth == 0) break;
        --depth;
      } else if (c == ',' && depth == 0) {
        break;
      }
      ++pos_;
    }
    if (quote || depth != 0) return false;
    std::string_view raw = trim(s_.substr(start, pos_ - start));
    if (raw.empty()) return false;
    // split off a trailing repeat marker
    constexpr std::string_view kOpen = " <repeats ";
    auto rep = raw.rfind(kOpen);
    if (rep != std::string_view::npos && raw.ends_with(" times>")) {
      std::string_view digits =
          raw.substr(rep + kOpen.size(), raw.size() - rep - kOpen.size() - 7);
      std::uint64_t n = 0;
      auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
      if (ec == std::errc{} && end == digits.data() + digits.size()) {
        e.repeat = n;
        raw = raw.substr(0, rep);
      }
    }
    e.value = scalar(std::string(raw));
    return true;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

struct RenderState {
  const RenderLimits& limits;
  bool truncated = false;
  int depth = 1;
};

std::string render(const ValueNode& node, int level, RenderState& st);

// Logical indices shown under the width rule; npos marks the ellipsis.
std::vector<std::uint64_t> shown_indices(std::uint64_t n, const RenderLimits& lim, bool& cut) {
  std::vector<std::uint64_t> idx;
  if (n <= lim.head + lim.tail) {
    for (std::uint64_t i = 0; i < n; ++i) idx.push_back(i);
    cut = false;
    return idx;
  }
  for (std::uint64_t i = 0; i < lim.head; ++i) idx.push_back(i);
  idx.push_back(UINT64_MAX);
  for (std::uint64_t i = n - lim.tail; i < n; ++i) idx.push_back(i);
  cut = true;
  return idx;
}

// Maps a logical index onto a run-length encoded sequence.
template <typename Runs, typename Count>
std::size_t run_at(const Runs& runs, std::uint64_t index, Count count) {
  for (std::size_t r = 0; r < runs.size(); ++r) {
    std::uint64_t c = count(runs[r]);
    if (index < c) return r;
    index -= c;
  }
  return runs.size() - 1;
}

std::string render(const ValueNode& node, int level, RenderState& st) {
  switch (node.kind) {
    case ValueNode::Kind::Scalar:
      return node.text;
    case ValueNode::Kind::Chars:
    case ValueNode::Kind::Aggregate: {
      const bool is_struct =
          node.kind == ValueNode::Kind::Aggregate &&
          std::any_of(node.elements.begin(), node.elements.end(),
                      [](const ValueNode::Element& e) { return !e.name.empty(); });
      const char* open = is_struct ? "{" : "[";
      const char* close = is_struct ? "}" : "]";
      const std::uint64_t n = node.size();
      if (n == 0) return std::string(open) + close;
      if (level > st.limits.max_depth) {
        st.truncated = true;
        return std::string(open) + "..." + close;
      }
      st.depth = std::max(st.depth, level);
      bool cut = false;
      std::string out = open;
      bool first = true;
      for (std::uint64_t i : shown_indices(n, st.limits, cut)) {
        if (!first) out += ", ";
        first = false;
        if (i == UINT64_MAX) {
          out += "...";
          continue;
        }
        if (node.kind == ValueNode::Kind::Chars) {
          out += node.chars[run_at(node.chars, i, [](const auto& r) { return r.count; })].literal;
        } else {
          const auto& e =
              node.elements[run_at(node.elements, i, [](const auto& el) { return el.repeat; })];
          if (!e.name.empty()) out += e.name + " = ";
          out += render(e.value, level + 1, st);
        }
      }
      if (cut) st.truncated = true;
      return out + close;
    }
  }
  return node.text;
}

}  // namespace

ValueNode parse_value_text(std::string_view text) { return Parser(text).parse_top(); }

RenderedValue render_value_node(const ValueNode& node, const RenderLimits& limits, int level) {
  RenderState st{limits};
  st.depth = 0;
  RenderedValue v;
  v.text = render(node, level, st);
  v.truncated = st.truncated;
  v.depth_reached = std::max(1, st.depth);
  return v;
}

bool is_null_pointer_text(std::string_view raw) {
  std::string_view t = trim(raw);
  if (t == "0" || t == "0x0") return true;
  return t.starts_with("0x0 ") || t.starts_with("(nil)");
}

RenderedValue render_value(const VariableBinding& binding, const Evaluator& evaluate,
                           const RenderLimits& limits) {
  if (!binding.is_pointer) return render_value_text(binding.raw_value, limits);

  RenderedValue bare{std::string(trim(binding.raw_value)), false, 1};
  const std::string_view type = binding.type;
  const bool function_pointer = type.find("(*)") != std::string_view::npos;
  const bool shows_string = binding.raw_value.find('"') != std::string::npos;
  const bool void_pointer = trim(type) == "void *" || trim(type) == "const void *";
  if (!evaluate || !is_identifier(binding.name) || is_null_pointer_text(binding.raw_value) ||
      function_pointer || shows_string || void_pointer || limits.max_depth < 2) {
    return bare;
  }
  std::optional<std::string> pointee = evaluate("*" + binding.name);
  if (!pointee) return bare;
  RenderedValue inner = render_value_node(parse_value_text(*pointee), limits, 2);
  RenderedValue v;
  v.text = bare.text + std::string(kArrow) + inner.text;
  v.truncated = inner.truncated;
  v.depth_reached = inner.depth_reached;
  return v;
}

}  // namespace dbgpilot
