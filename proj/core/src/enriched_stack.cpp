#include "dbgpilot/enriched_stack.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "dbgpilot/errors.hpp"
#include "dbgpilot/text.hpp"

namespace dbgpilot {

namespace fs = std::filesystem;

std::size_t EnrichedStack::shown_frames() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(),
                    [](const StackEntry& e) { return std::holds_alternative<EnrichedFrame>(e); }));
}

std::size_t EnrichedStack::hidden_frames() const {
  std::size_t n = 0;
  for (const auto& e : entries) {
    if (const auto* m = std::get_if<ElisionMarker>(&e)) n += m->hidden;
  }
  return n;
}

std::string elision_text(std::size_t hidden) {
  return "[... skipping " + std::to_string(hidden) + " hidden frame(s)]";
}

namespace {

void append_bindings(std::string& out, const char* title,
                     const std::vector<RenderedBinding>& bindings) {
  out += "\n   ";
  out += title;
  out += '\n';
  for (const auto& b : bindings) {
    out += "     " + b.name + ": " + b.type + " = " + b.value.text + "\n";
  }
}

}  // namespace

std::vector<std::string> EnrichedStack::blocks() const {
  std::vector<std::string> out;
  // the innermost shown frame is the one marked as current
  std::size_t last_frame = entries.size();
  for (std::size_t i = entries.size(); i-- > 0;) {
    if (std::holds_alternative<EnrichedFrame>(entries[i])) {
      last_frame = i;
      break;
    }
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (const auto* m = std::get_if<ElisionMarker>(&entries[i])) {
      out.push_back(elision_text(m->hidden) + "\n");
      continue;
    }
    const auto& f = std::get<EnrichedFrame>(entries[i]);
    std::string block = i == last_frame ? "> " : "";
    block += f.display_path + "(" + std::to_string(f.frame.line.value_or(0)) + ")" +
             f.frame.function + "()\n";
    if (f.window) block += *f.window;
    if (!f.bindings.empty()) append_bindings(block, "Variables in this frame:", f.bindings);
    if (f.globals && !f.globals->empty()) append_bindings(block, "Global variables:", *f.globals);
    out.push_back(std::move(block));
  }
  return out;
}

std::string EnrichedStack::render() const {
  std::string out;
  for (const auto& b : blocks()) {
    if (!out.empty()) out += '\n';
    out += b;
  }
  return out;
}

bool path_within(const fs::path& file, const fs::path& root) {
  std::error_code ec;
  fs::path f = fs::weakly_canonical(fs::absolute(file), ec);
  if (ec) f = fs::absolute(file).lexically_normal();
  fs::path r = fs::weakly_canonical(fs::absolute(root), ec);
  if (ec) r = fs::absolute(root).lexically_normal();
  auto fi = f.begin();
  for (auto ri = r.begin(); ri != r.end(); ++ri, ++fi) {
    if (ri->empty()) continue;  // trailing separator
    if (fi == f.end() || *fi != *ri) return false;
  }
  return true;
}

namespace {

// Index just past the brace that closes the one at `open`, skipping
// comments and literals; npos if unbalanced.
std::size_t match_brace(std::string_view src, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < src.size(); ++i) {
    char c = src[i];
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      auto end = src.find("*/", i + 2);
      if (end == std::string_view::npos) return std::string_view::npos;
      i = end + 1;
    } else if (c == '"' || c == '\'') {
      for (++i; i < src.size() && src[i] != c; ++i) {
        if (src[i] == '\\') ++i;
      }
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

int line_of(std::string_view src, std::size_t offset) {
  return 1 + static_cast<int>(std::count(src.begin(), src.begin() + static_cast<long>(offset), '\n'));
}

}  // namespace

std::optional<std::string> function_body(std::string_view src, std::string_view function,
                                         int line) {
  std::optional<std::string> best;
  std::size_t from = 0;
  while (from < src.size()) {
    auto pos = find_word(src.substr(from), function);
    if (pos == std::string_view::npos) break;
    pos += from;
    from = pos + function.size();
    std::size_t p = from;
    while (p < src.size() && (src[p] == ' ' || src[p] == '\t')) ++p;
    if (p >= src.size() || src[p] != '(') continue;
    // a definition: the parameter list is followed by a body, not ';' or ','
    int paren = 0;
    std::size_t q = p;
    for (; q < src.size(); ++q) {
      if (src[q] == '(') ++paren;
      if (src[q] == ')' && --paren == 0) break;
    }
    if (q >= src.size()) break;
    std::size_t open = src.find_first_not_of(" \t\r\n", q + 1);
    if (open == std::string_view::npos || src[open] != '{') continue;
    std::size_t close = match_brace(src, open);
    if (close == std::string_view::npos) continue;
    if (line_of(src, pos) <= line && line <= line_of(src, close - 1)) {
      best = std::string(src.substr(open, close - open));
    }
  }
  return best;
}

namespace {

std::string display_path(const fs::path& file, const fs::path& root) {
  std::error_code ec;
  fs::path f = fs::weakly_canonical(fs::absolute(file), ec);
  fs::path r = fs::weakly_canonical(fs::absolute(root), ec);
  fs::path rel = f.lexically_relative(r);
  if (rel.empty()) rel = file.filename();
  return "./" + rel.generic_string();
}

std::optional<std::string> read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<RenderedBinding> frame_bindings(DebugTarget& target, int index,
                                            const EnrichOptions& options) {
  std::vector<VariableBinding> raw;
  try {
    raw = target.frame_variables(index);
  } catch (const Error&) {
    return {};
  }
  Evaluator eval = [&target, index](std::string_view expr) {
    return target.try_evaluate(expr, index);
  };
  std::vector<RenderedBinding> out;
  out.reserve(raw.size());
  for (const auto& b : raw) {
    out.push_back({b.name, b.type, render_value(b, eval, options.limits)});
  }
  return out;
}

std::vector<RenderedBinding> frame_globals(DebugTarget& target, const EnrichedFrame& ef,
                                           const EnrichOptions& options) {
  if (!ef.frame.file || !ef.frame.line) return {};
  auto source = read_file(*ef.frame.file);
  if (!source) return {};
  auto body = function_body(*source, ef.frame.function, *ef.frame.line);
  if (!body) return {};

  std::set<std::string> locals;
  for (const auto& b : ef.bindings) locals.insert(b.name);
  std::vector<std::string> candidates;
  for (auto& id : identifiers_in(*body)) {
    if (!locals.count(id) && id != ef.frame.function) candidates.push_back(std::move(id));
  }
  if (candidates.empty()) return {};

  std::vector<GlobalSymbol> symbols = target.global_variables(candidates);
  Evaluator eval = [&target, index = ef.frame.index](std::string_view expr) {
    return target.try_evaluate(expr, index);
  };
  std::vector<RenderedBinding> out;
  for (const auto& name : candidates) {
    if (out.size() >= options.max_globals) break;
    auto it = std::find_if(symbols.begin(), symbols.end(), [&](const GlobalSymbol& g) {
      return g.name == name && path_within(g.file, options.workspace_root);
    });
    if (it == symbols.end()) continue;
    auto raw = target.try_evaluate(name, ef.frame.index);
    if (!raw) continue;
    VariableBinding b{name, it->type, *raw, is_pointer_type(it->type)};
    out.push_back({b.name, b.type, render_value(b, eval, options.limits)});
  }
  return out;
}

bool is_user_frame(const Frame& f, const fs::path& root) {
  return f.file && f.line && path_within(*f.file, root);
}

}  // namespace

EnrichedStack build_enriched_stack(DebugTarget& target, const EnrichOptions& options) {
  if (!target.is_stopped()) throw Error(Errc::NotStopped, "the target is not stopped");
  std::vector<Frame> frames = target.backtrace();
  EnrichedStack stack;
  stack.total_frames = std::max(target.stack_depth(), frames.size());

  // innermost-first while building, reversed at the end
  std::vector<StackEntry> entries;
  auto hide = [&entries](std::size_t n) {
    if (n == 0) return;
    if (!entries.empty()) {
      if (auto* m = std::get_if<ElisionMarker>(&entries.back())) {
        m->hidden += n;
        return;
      }
    }
    entries.push_back(ElisionMarker{n});
  };

  std::optional<std::size_t> outermost_user;
  for (const Frame& f : frames) {
    if (!is_user_frame(f, options.workspace_root)) {
      hide(1);
      continue;
    }
    EnrichedFrame ef;
    ef.frame = f;
    ef.display_path = display_path(*f.file, options.workspace_root);
    try {
      ef.window = source_window(*f.file, *f.line, options.window);
    } catch (const Error&) {
      ef.window.reset();
    }
    ef.bindings = frame_bindings(target, f.index, options);
    outermost_user = entries.size();
    entries.push_back(std::move(ef));
  }
  hide(stack.total_frames - frames.size());

  if (outermost_user) {
    auto& ef = std::get<EnrichedFrame>(entries[*outermost_user]);
    ef.globals = frame_globals(target, ef, options);
  }
  std::reverse(entries.begin(), entries.end());
  stack.entries = std::move(entries);
  return stack;
}

}  // namespace dbgpilot
