#include "dbgpilot/mi/value.hpp"

#include <cstdio>

namespace dbgpilot::mi {

Value Value::make_const(std::string text) {
  Value v;
  v.kind_ = Kind::Const;
  v.text_ = std::move(text);
  return v;
}

Value Value::make_tuple(std::vector<Result> fields) {
  Value v;
  v.kind_ = Kind::Tuple;
  v.children_ = std::move(fields);
  return v;
}

Value Value::make_list(std::vector<Result> items) {
  Value v;
  v.kind_ = Kind::List;
  v.children_ = std::move(items);
  return v;
}

const Value* Value::find(std::string_view name) const {
  for (const auto& child : children_) {
    if (child.name == name) return &child.value;
  }
  return nullptr;
}

std::string Value::get_text(std::string_view name, std::string_view fallback) const {
  const Value* v = find(name);
  if (v && v->is_const()) return v->text();
  return std::string(fallback);
}

bool operator==(const Value& a, const Value& b) {
  return a.kind_ == b.kind_ && a.text_ == b.text_ && a.children_ == b.children_;
}

std::string quote_cstring(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  out.push_back('"');
  for (unsigned char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          char buf[5];
          std::snprintf(buf, sizeof buf, "\\%03o", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
  return out;
}

namespace {

void append_results(std::string& out, const std::vector<Result>& items) {
  bool first = true;
  for (const auto& item : items) {
    if (!first) out.push_back(',');
    first = false;
    if (!item.name.empty()) {
      out += item.name;
      out.push_back('=');
    }
    out += to_mi(item.value);
  }
}

}  // namespace

std::string to_mi(const Value& value) {
  switch (value.kind()) {
    case Value::Kind::Const:
      return quote_cstring(value.text());
    case Value::Kind::Tuple: {
      std::string out = "{";
      append_results(out, value.children());
      out.push_back('}');
      return out;
    }
    case Value::Kind::List: {
      std::string out = "[";
      append_results(out, value.children());
      out.push_back(']');
      return out;
    }
  }
  return {};
}

}  // namespace dbgpilot::mi
