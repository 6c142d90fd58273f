#include "dbgpilot/mi/record.hpp"

#include <cctype>
#include <charconv>

namespace dbgpilot::mi {

std::string_view to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::Result: return "result";
    case RecordKind::AsyncExec: return "exec";
    case RecordKind::AsyncStatus: return "status";
    case RecordKind::AsyncNotify: return "notify";
    case RecordKind::ConsoleStream: return "console";
    case RecordKind::TargetStream: return "target";
    case RecordKind::LogStream: return "log";
    case RecordKind::Prompt: return "prompt";
  }
  return "unknown";
}

namespace {

// Recursive-descent reader over one line. Every method returns false on a
// grammar violation; the caller then degrades the whole line to unparsed.
class Reader {
 public:
  explicit Reader(std::string_view s) : s_(s) {}

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  bool consume(char c) {
    if (peek() != c || at_end()) return false;
    ++pos_;
    return true;
  }

  bool read_cstring(std::string& out) {
    if (!consume('"')) return false;
    while (!at_end()) {
      char c = s_[pos_++];
      if (c == '"') return true;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) return false;
      char e = s_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'a': out.push_back('\a'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'v': out.push_back('\v'); break;
        case 'e': out.push_back('\x1b'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case '\'': out.push_back('\''); break;
        case 'x': {
          int value = 0;
          int digits = 0;
          while (digits < 2 && !at_end() && std::isxdigit(static_cast<unsigned char>(peek()))) {
            char h = s_[pos_++];
            value = value * 16 + (std::isdigit(static_cast<unsigned char>(h))
                                      ? h - '0'
                                      : (std::tolower(static_cast<unsigned char>(h)) - 'a' + 10));
            ++digits;
          }
          if (digits == 0) return false;
          out.push_back(static_cast<char>(value));
          break;
        }
        default:
          if (e >= '0' && e <= '7') {
            int value = e - '0';
            int digits = 1;
            while (digits < 3 && peek() >= '0' && peek() <= '7' && !at_end()) {
              value = value * 8 + (s_[pos_++] - '0');
              ++digits;
            }
            out.push_back(static_cast<char>(value & 0xff));
          } else {
            return false;
          }
      }
    }
    return false;
  }

  bool read_value(Value& out) {
    switch (peek()) {
      case '"': {
        std::string text;
        if (!read_cstring(text)) return false;
        out = Value::make_const(std::move(text));
        return true;
      }
      case '{': {
        ++pos_;
        std::vector<Result> items;
        if (!read_items('}', items)) return false;
        out = Value::make_tuple(std::move(items));
        return true;
      }
      case '[': {
        ++pos_;
        std::vector<Result> items;
        if (!read_items(']', items)) return false;
        out = Value::make_list(std::move(items));
        return true;
      }
      default:
        return false;
    }
  }

  // name=value, or a bare value inside an aggregate.
  bool read_item(Result& out, bool allow_bare) {
    char c = peek();
    if (allow_bare && (c == '"' || c == '{' || c == '[')) {
      out.name.clear();
      return read_value(out.value);
    }
    std::size_t start = pos_;
    while (!at_end() && peek() != '=' && peek() != ',' && peek() != '}' && peek() != ']' &&
           peek() != '"') {
      ++pos_;
    }
    if (pos_ == start || !consume('=')) return false;
    out.name = std::string(s_.substr(start, pos_ - 1 - start));
    return read_value(out.value);
  }

  bool read_items(char close, std::vector<Result>& items) {
    if (consume(close)) return true;
    for (;;) {
      Result r;
      if (!read_item(r, true)) return false;
      items.push_back(std::move(r));
      if (consume(close)) return true;
      if (!consume(',')) return false;
    }
  }

  bool read_results(std::vector<Result>& out) {
    while (!at_end()) {
      if (!consume(',')) return false;
      Result r;
      // gdb emits unnamed tuples in +download status records
      if (!read_item(r, true)) return false;
      out.push_back(std::move(r));
    }
    return true;
  }

  std::string_view read_class() {
    std::size_t start = pos_;
    while (!at_end() && peek() != ',') ++pos_;
    return s_.substr(start, pos_ - start);
  }

  std::size_t pos() const { return pos_; }
  void set_pos(std::size_t p) { pos_ = p; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

Record unparsed(std::string_view line) {
  Record r;
  r.kind = RecordKind::LogStream;
  r.text = std::string(line);
  r.unparsed = true;
  return r;
}

bool is_prompt_line(std::string_view line) {
  if (line.substr(0, 5) != "(gdb)") return false;
  for (char c : line.substr(5)) {
    if (c != ' ' && c != '\t') return false;
  }
  return true;
}

}  // namespace

Record parse_line(std::string_view line) {
  if (is_prompt_line(line)) {
    Record r;
    r.kind = RecordKind::Prompt;
    return r;
  }
  Reader in(line);
  Record r;

  std::size_t digits = 0;
  while (digits < line.size() && line[digits] >= '0' && line[digits] <= '9') ++digits;
  if (digits > 0) {
    std::uint64_t token = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + digits, token);
    if (ec != std::errc{} || ptr != line.data() + digits) return unparsed(line);
    r.token = token;
    in.set_pos(digits);
  }

  char sigil = in.peek();
  if (in.at_end()) return unparsed(line);
  in.consume(sigil);
  switch (sigil) {
    case '^': r.kind = RecordKind::Result; break;
    case '*': r.kind = RecordKind::AsyncExec; break;
    case '+': r.kind = RecordKind::AsyncStatus; break;
    case '=': r.kind = RecordKind::AsyncNotify; break;
    case '~': r.kind = RecordKind::ConsoleStream; break;
    case '@': r.kind = RecordKind::TargetStream; break;
    case '&': r.kind = RecordKind::LogStream; break;
    default: return unparsed(line);
  }

  if (sigil == '~' || sigil == '@' || sigil == '&') {
    if (r.token) return unparsed(line);
    if (!in.read_cstring(r.text) || !in.at_end()) return unparsed(line);
    return r;
  }

  std::string_view cls = in.read_class();
  if (cls.empty()) return unparsed(line);
  r.cls = std::string(cls);
  if (!in.read_results(r.payload)) return unparsed(line);
  return r;
}

std::string serialize(const Record& record) {
  if (record.unparsed) return record.text;
  std::string out;
  if (record.token) out += std::to_string(*record.token);
  switch (record.kind) {
    case RecordKind::Prompt: return "(gdb) ";
    case RecordKind::ConsoleStream: return "~" + quote_cstring(record.text);
    case RecordKind::TargetStream: return "@" + quote_cstring(record.text);
    case RecordKind::LogStream: return "&" + quote_cstring(record.text);
    case RecordKind::Result: out.push_back('^'); break;
    case RecordKind::AsyncExec: out.push_back('*'); break;
    case RecordKind::AsyncStatus: out.push_back('+'); break;
    case RecordKind::AsyncNotify: out.push_back('='); break;
  }
  out += record.cls;
  for (const auto& item : record.payload) {
    out.push_back(',');
    if (!item.name.empty()) {
      out += item.name;
      out.push_back('=');
    }
    out += to_mi(item.value);
  }
  return out;
}

const Value* Record::find(std::string_view name) const {
  for (const auto& item : payload) {
    if (item.name == name) return &item.value;
  }
  return nullptr;
}

std::string Record::get_text(std::string_view name, std::string_view fallback) const {
  const Value* v = find(name);
  if (v && v->is_const()) return v->text();
  return std::string(fallback);
}

bool operator==(const Record& a, const Record& b) {
  return a.kind == b.kind && a.token == b.token && a.cls == b.cls && a.payload == b.payload &&
         a.text == b.text && a.unparsed == b.unparsed;
}

const Record* Output::result() const {
  for (const auto& r : records) {
    if (r.kind == RecordKind::Result) return &r;
  }
  return nullptr;
}

const Record* Output::async_exec(std::string_view cls) const {
  for (const auto& r : records) {
    if (r.kind == RecordKind::AsyncExec && r.cls == cls) return &r;
  }
  return nullptr;
}

std::string Output::console_text() const {
  std::string text;
  for (const auto& r : records) {
    if (r.kind == RecordKind::ConsoleStream) text += r.text;
  }
  return text;
}

std::string Output::log_text() const {
  std::string text;
  for (const auto& r : records) {
    if (r.kind == RecordKind::LogStream && !r.unparsed) text += r.text;
  }
  return text;
}

}  // namespace dbgpilot::mi
