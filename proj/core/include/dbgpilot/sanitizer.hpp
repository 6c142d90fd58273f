#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dbgpilot {

enum class SanitizerMode { NativeStrict, Whitelist, Unsafe };

std::string_view to_string(SanitizerMode mode);

/// Prefix set member that admits every command (Unsafe mode).
inline constexpr std::string_view kAllowAll = "*";

/// Commands a model may issue in `mode`. Resuming commands (run, continue,
/// step, kill, ...) are never in the set outside Unsafe mode.
std::set<std::string, std::less<>> allowed_command_prefixes(SanitizerMode mode);

/// The command forms listed to the model, in display order.
std::vector<std::string> command_summary();

class SanitizerPolicy {
 public:
  /// Default policy: no function calls at all.
  static SanitizerPolicy native_strict();
  /// Function calls allowed only to the named functions.
  static SanitizerPolicy whitelist(std::set<std::string, std::less<>> functions);
  /// Builds the policy from command-line flags. This is the only way to get
  /// Unsafe mode. Throws Error(ConfigError) when both are given.
  static SanitizerPolicy from_flags(bool unsafe,
                                    std::optional<std::set<std::string, std::less<>>> whitelist);

  /// Reads a whitelist file: one function name per line, '#' comments.
  static std::set<std::string, std::less<>> load_whitelist(const std::filesystem::path& file);

  SanitizerMode mode() const noexcept { return mode_; }
  const std::set<std::string, std::less<>>& functions() const noexcept { return functions_; }
  const std::set<std::string, std::less<>>& prefixes() const noexcept { return prefixes_; }

 private:
  SanitizerPolicy(SanitizerMode mode, std::set<std::string, std::less<>> functions);

  SanitizerMode mode_;
  std::set<std::string, std::less<>> functions_;
  std::set<std::string, std::less<>> prefixes_;
};

struct Verdict {
  bool allowed = true;
  std::string reason;  // empty when allowed

  static Verdict allow() { return {}; }
  static Verdict deny(std::string why) { return {false, std::move(why)}; }

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Pure, total check of one model-issued command.
Verdict sanitize(std::string_view command, const SanitizerPolicy& policy);

/// Names that appear in call position (`name(` or `$name(`), in order.
/// An anonymous call through an expression, `(...)(`, is reported as "(*)".
std::vector<std::string> called_functions(std::string_view expression);

/// The command word without a `/format` suffix: "p/x" -> "p".
std::string_view command_word(std::string_view command);

}  // namespace dbgpilot
