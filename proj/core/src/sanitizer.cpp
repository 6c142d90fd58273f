#include "dbgpilot/sanitizer.hpp"

#include <fstream>

#include "dbgpilot/errors.hpp"
#include "dbgpilot/text.hpp"

namespace dbgpilot {

using NameSet = std::set<std::string, std::less<>>;

std::string_view to_string(SanitizerMode mode) {
  switch (mode) {
    case SanitizerMode::NativeStrict: return "native-strict";
    case SanitizerMode::Whitelist: return "whitelist";
    case SanitizerMode::Unsafe: return "unsafe";
  }
  return "native-strict";
}

NameSet allowed_command_prefixes(SanitizerMode mode) {
  if (mode == SanitizerMode::Unsafe) return {std::string(kAllowAll)};
  NameSet s = {"bt", "backtrace", "where", "up",   "down", "frame", "f",     "p",
               "print", "list", "l",      "info", "i",    "x",     "ptype", "whatis"};
  if (mode == SanitizerMode::Whitelist) s.insert("call");
  return s;
}

std::vector<std::string> command_summary() {
  return {"bt", "up", "down", "frame", "p expression", "list", "info", "x", "ptype", "whatis"};
}

SanitizerPolicy::SanitizerPolicy(SanitizerMode mode, NameSet functions)
    : mode_(mode), functions_(std::move(functions)), prefixes_(allowed_command_prefixes(mode)) {}

SanitizerPolicy SanitizerPolicy::native_strict() {
  return SanitizerPolicy(SanitizerMode::NativeStrict, {});
}

SanitizerPolicy SanitizerPolicy::whitelist(NameSet functions) {
  return SanitizerPolicy(SanitizerMode::Whitelist, std::move(functions));
}

SanitizerPolicy SanitizerPolicy::from_flags(bool unsafe, std::optional<NameSet> whitelist) {
  if (unsafe && whitelist) {
    throw Error(Errc::ConfigError, "--unsafe and --whitelist cannot be combined");
  }
  if (unsafe) return SanitizerPolicy(SanitizerMode::Unsafe, {});
  if (whitelist) return SanitizerPolicy::whitelist(std::move(*whitelist));
  return native_strict();
}

NameSet SanitizerPolicy::load_whitelist(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::ConfigError, "cannot read whitelist " + file.string());
  NameSet names;
  for (std::string line; std::getline(in, line);) {
    auto hash = line.find('#');
    std::string_view name = trim(std::string_view(line).substr(0, hash));
    if (name.empty()) continue;
    if (!is_identifier(name)) {
      throw Error(Errc::ConfigError, "bad function name in whitelist: '" + std::string(name) + "'");
    }
    names.emplace(name);
  }
  return names;
}

std::string_view command_word(std::string_view command) {
  std::string_view word = first_word(command);
  auto slash = word.find('/');
  if (slash != std::string_view::npos && slash > 0) word = word.substr(0, slash);
  return word;
}

namespace {

const NameSet& non_call_keywords() {
  static const NameSet k = {"sizeof", "alignof", "_Alignof", "__alignof__", "typeof",
                            "__typeof__", "__typeof", "_Generic"};
  return k;
}

const NameSet& type_keywords() {
  static const NameSet k = {"int",    "char",   "short",    "long",   "unsigned", "signed",
                            "float",  "double", "void",     "_Bool",  "bool",     "struct",
                            "union",  "enum",   "const",    "volatile"};
  return k;
}

bool is_word_start(char c) { return is_ident_start(c) || c == '$'; }
bool is_word_char(char c) { return is_ident_char(c) || c == '$'; }

std::string_view leading_word(std::string_view s, std::size_t from) {
  while (from < s.size() && (s[from] == ' ' || s[from] == '\t')) ++from;
  std::size_t end = from;
  while (end < s.size() && is_word_char(s[end])) ++end;
  return s.substr(from, end - from);
}

}  // namespace

std::vector<std::string> called_functions(std::string_view s) {
  std::vector<std::string> calls;
  enum class Last { Other, Word, Group } last = Last::Other;
  std::string_view last_word;
  std::size_t last_group = 0;
  std::vector<std::size_t> open;

  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == ' ' || c == '\t') continue;
    if (c == '"' || c == '\'') {
      for (++i; i < s.size() && s[i] != c; ++i) {
        if (s[i] == '\\') ++i;
      }
      last = Last::Other;
    } else if (is_word_start(c)) {
      std::size_t start = i;
      while (i + 1 < s.size() && is_word_char(s[i + 1])) ++i;
      last_word = s.substr(start, i + 1 - start);
      last = Last::Word;
    } else if (c >= '0' && c <= '9') {
      while (i + 1 < s.size() && (is_ident_char(s[i + 1]) || s[i + 1] == '.')) ++i;
      last = Last::Other;
    } else if (c == '(') {
      if (last == Last::Word && !non_call_keywords().count(last_word) &&
          !type_keywords().count(last_word)) {
        calls.emplace_back(last_word);
      } else if (last == Last::Group && !type_keywords().count(leading_word(s, last_group + 1))) {
        calls.emplace_back("(*)");
      }
      open.push_back(i);
      last = Last::Other;
    } else if (c == ')') {
      if (!open.empty()) {
        last_group = open.back();
        open.pop_back();
        last = Last::Group;
      } else {
        last = Last::Other;
      }
    } else {
      last = Last::Other;
    }
  }
  return calls;
}

namespace {

// Assignment and increment operators, which would modify the target.
// Operators are read longest first, as a C lexer would.
std::optional<std::string> side_effect(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"' || c == '\'') {
      for (++i; i < s.size() && s[i] != c; ++i) {
        if (s[i] == '\\') ++i;
      }
      continue;
    }
    std::string_view rest = s.substr(i);
    if (rest.starts_with("<<=") || rest.starts_with(">>=")) return std::string(rest.substr(0, 3));
    if (rest.starts_with("==") || rest.starts_with("!=") || rest.starts_with("<=") ||
        rest.starts_with(">=") || rest.starts_with("->") || rest.starts_with("<<") ||
        rest.starts_with(">>")) {
      ++i;
      continue;
    }
    if (rest.starts_with("++") || rest.starts_with("--")) return std::string(rest.substr(0, 2));
    const bool compound = std::string_view("+-*/%&|^").find(c) != std::string_view::npos;
    if (compound && rest.size() >= 2 && rest[1] == '=') {
      return std::string(rest.substr(0, 2));
    }
    if (c == '=') return std::string("=");
  }
  return std::nullopt;
}

}  // namespace

Verdict sanitize(std::string_view command, const SanitizerPolicy& policy) {
  if (policy.mode() == SanitizerMode::Unsafe) return Verdict::allow();

  if (command.find_first_of("\n\r") != std::string_view::npos) {
    return Verdict::deny("multiple commands: only one command per call is allowed");
  }
  std::string_view cmd = trim(command);
  if (cmd.empty()) return Verdict::deny("empty command");
  std::string_view word = command_word(cmd);
  std::string_view args = cmd.substr(first_word(cmd).size());

  for (const auto& fn : called_functions(args)) {
    if (policy.mode() == SanitizerMode::Whitelist && policy.functions().count(fn)) continue;
    if (fn == "(*)") return Verdict::deny("function call through an expression is not allowed");
    return Verdict::deny("function call to '" + fn + "' is not allowed");
  }
  if (!policy.prefixes().count(word)) {
    return Verdict::deny("command '" + std::string(word) + "' is not allowed");
  }
  if (auto op = side_effect(args)) {
    return Verdict::deny("operator '" + *op + "' would modify the program");
  }
  return Verdict::allow();
}

}  // namespace dbgpilot
