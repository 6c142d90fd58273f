#pragma once

#include <map>
#include <string>
#include <vector>

#include "dbgpilot/debugger_session.hpp"
#include "dbgpilot/errors.hpp"

namespace dbgpilot::testkit {

/// Scriptable stand-in for a stopped debuggee.
class FakeTarget : public DebugTarget {
 public:
  StopEvent stop;
  bool stopped = true;
  std::vector<Frame> frames;  // innermost first, already capped
  std::size_t depth = 0;      // 0 means frames.size()
  std::map<int, std::vector<VariableBinding>> variables;
  std::map<std::string, std::string> values;  // expression -> value, any frame
  std::vector<GlobalSymbol> globals;
  std::map<std::string, std::string> console;  // command -> output
  std::map<std::string, SourceLoc> symbols;
  std::vector<std::string> args;
  std::vector<std::string> console_log;

  const StopEvent& last_stop() const override { return stop; }
  bool is_stopped() const override { return stopped; }
  std::vector<Frame> backtrace() override { return frames; }
  std::size_t stack_depth() override { return depth ? depth : frames.size(); }

  std::vector<VariableBinding> frame_variables(int frame) override {
    if (frame < 0 || static_cast<std::size_t>(frame) >= stack_depth()) {
      throw Error(Errc::BadFrameIndex, "no frame " + std::to_string(frame));
    }
    auto it = variables.find(frame);
    return it == variables.end() ? std::vector<VariableBinding>{} : it->second;
  }

  std::optional<std::string> try_evaluate(std::string_view expression, int) override {
    auto it = values.find(std::string(expression));
    if (it == values.end()) return std::nullopt;
    return it->second;
  }

  std::vector<GlobalSymbol> global_variables(const std::vector<std::string>& names) override {
    std::vector<GlobalSymbol> out;
    for (const auto& g : globals) {
      for (const auto& n : names) {
        if (g.name == n) {
          out.push_back(g);
          break;
        }
      }
    }
    return out;
  }

  std::string execute_console(std::string_view command) override {
    console_log.emplace_back(command);
    auto it = console.find(std::string(command));
    return it == console.end() ? std::string("ok\n") : it->second;
  }

  std::optional<SourceLoc> lookup_symbol(std::string_view name) override {
    auto it = symbols.find(std::string(name));
    if (it == symbols.end()) return std::nullopt;
    return it->second;
  }

  std::string captured_output() override { return {}; }
  std::vector<std::string> target_args() const override { return args; }
};

}  // namespace dbgpilot::testkit
