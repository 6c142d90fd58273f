#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dbgpilot/mi/value.hpp"

namespace dbgpilot::mi {

enum class RecordKind {
  Result,        // ^done, ^error, ...
  AsyncExec,     // *stopped, *running
  AsyncStatus,   // +download
  AsyncNotify,   // =thread-created, =library-loaded, ...
  ConsoleStream, // ~"..."
  TargetStream,  // @"..."
  LogStream,     // &"..." and unparsed lines
  Prompt,        // (gdb)
};

std::string_view to_string(RecordKind kind);

/// One line of debugger output.
///
/// Stream records keep their unescaped text in `text`. Lines that do not
/// follow the output grammar become LogStream records with `unparsed` set and
/// the raw line in `text`.
struct Record {
  RecordKind kind = RecordKind::LogStream;
  std::optional<std::uint64_t> token;
  std::string cls;
  std::vector<Result> payload;
  std::string text;
  bool unparsed = false;

  const Value* find(std::string_view name) const;
  std::string get_text(std::string_view name, std::string_view fallback = {}) const;

  bool is_result() const noexcept { return kind == RecordKind::Result; }
  bool is_prompt() const noexcept { return kind == RecordKind::Prompt; }

  friend bool operator==(const Record& a, const Record& b);
};

/// Parses one protocol line (no trailing newline). Total: never throws.
Record parse_line(std::string_view line);

/// Serializes a record back to one protocol line.
std::string serialize(const Record& record);

/// All records produced by one command, terminated by a Prompt.
struct Output {
  std::vector<Record> records;

  /// The Result record, or nullptr if none arrived.
  const Record* result() const;
  /// First async exec record with the given class ("stopped", "running").
  const Record* async_exec(std::string_view cls) const;
  /// Concatenated console-stream text.
  std::string console_text() const;
  /// Concatenated log-stream text (debugger error chatter).
  std::string log_text() const;
};

}  // namespace dbgpilot::mi
