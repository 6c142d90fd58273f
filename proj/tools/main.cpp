#include <unistd.h>

#include <iostream>

#include <CLI11.hpp>

#include "dbgpilot/interrupt.hpp"
#include "dbgpilot/repl.hpp"

int main(int argc, char** argv) {
  dbgpilot::ReplConfig config;
  std::string target;
  int timeout_s = static_cast<int>(config.timeout.count());

  CLI::App app{"Conversational debugging assistant for native programs"};
  app.set_version_flag("--version", "dbgpilot 0.3.0");
  app.add_option("target", target, "Executable to debug")->required();
  app.add_option("args", config.target_args, "Arguments for the target (after --)");
  app.add_option("--model", config.model, "Model name")->capture_default_str();
  app.add_option("--temperature", config.temperature, "Sampling temperature (provider default)");
  app.add_option("--base-url", config.base_url, "Chat-completions API base URL")
      ->capture_default_str();
  app.add_option("--api-key-env", config.api_key_env, "Environment variable holding the API key")
      ->capture_default_str();
  app.add_option("--script", config.script, "Scripted model responses (no network)")
      ->check(CLI::ExistingFile);
  app.add_option("--workspace", config.workspace_root, "Root of the user's sources")
      ->check(CLI::ExistingDirectory);
  auto* unsafe = app.add_flag("--unsafe", config.unsafe, "Run model commands without checks");
  auto* whitelist = app.add_option("--whitelist", config.whitelist,
                                   "File of functions the model may call")
                        ->check(CLI::ExistingFile);
  unsafe->excludes(whitelist);
  app.add_option("--log", config.log, "Write the session transcript (JSON lines)");
  app.add_option("--mi-log", config.mi_log, "Write raw debugger traffic");
  app.add_option("--lsp-log", config.lsp_log, "Write language-server traffic (JSON lines)");
  app.add_option("--budget", config.budget, "Prompt token budget")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--window", config.window, "Source lines shown per frame")
      ->capture_default_str()
      ->check(CLI::Range(1, 1000));
  app.add_option("--max-tool-calls", config.tool_call_cap, "Function calls allowed per turn")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--stdin", config.stdin_path, "File fed to the target's standard input")
      ->check(CLI::ExistingFile);
  app.add_option("--debugger", config.debugger, "Debugger executable")->capture_default_str();
  app.add_option("--clangd", config.clangd, "Language server executable")->capture_default_str();
  app.add_flag("--no-lsp", config.no_lsp, "Do not start the language server");
  app.add_option("--timeout", timeout_s, "Debugger command timeout in seconds")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? dbgpilot::kExitOk : dbgpilot::kExitUsage;
  }
  config.target = target;
  config.timeout = std::chrono::seconds(timeout_s);

  dbgpilot::install_interrupt_handler();
  return dbgpilot::run_repl(config, std::cin, std::cout, std::cerr, !::isatty(STDIN_FILENO));
}
