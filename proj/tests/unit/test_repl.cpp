#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dbgpilot/process.hpp"
#include "dbgpilot/repl.hpp"
#include "paths.hpp"

namespace fs = std::filesystem;
using namespace dbgpilot;

namespace {

const char* kQuestion = "Why is label null, and how many marbles are there?";

ReplConfig scripted_config() {
  ReplConfig c;
  c.target = testkit::fixture_bin("segfault");
  c.workspace_root = testkit::fixture_src();
  c.script = testkit::test_data() / "scripts" / "segfault_dialog.json";
  c.no_lsp = !testkit::have_clangd();
  return c;
}

// Live processes whose parent is this test process.
std::vector<pid_t> live_children() {
  std::vector<pid_t> out;
  for (const auto& entry : fs::directory_iterator("/proc")) {
    const std::string name = entry.path().filename();
    if (name.find_first_not_of("0123456789") != std::string::npos) continue;
    std::ifstream stat(entry.path() / "stat");
    std::string line;
    if (!std::getline(stat, line)) continue;
    auto close = line.rfind(')');
    if (close == std::string::npos) continue;
    std::istringstream rest(line.substr(close + 2));
    char state = 0;
    pid_t ppid = 0;
    rest >> state >> ppid;
    if (ppid == ::getpid() && state != 'Z') out.push_back(std::stoi(name));
  }
  return out;
}

// Processes whose command line mentions `marker`.
int processes_mentioning(const std::string& marker) {
  int n = 0;
  for (const auto& entry : fs::directory_iterator("/proc")) {
    const std::string name = entry.path().filename();
    if (name.find_first_not_of("0123456789") != std::string::npos) continue;
    std::string cmdline = testkit::slurp(entry.path() / "cmdline");
    if (cmdline.find(marker) != std::string::npos) ++n;
  }
  return n;
}

int run_shell(const std::string& command) {
  int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Repl, ScriptedSessionInProcess) {
  if (!testkit::have_debugger()) GTEST_SKIP() << "gdb not installed";
  std::istringstream in(std::string("p visits\n") + kQuestion + "\n");
  std::ostringstream out, err;
  const int rc = run_repl(scripted_config(), in, out, err, true);
  EXPECT_EQ(rc, kExitOk) << err.str();
  const std::string o = out.str();
  EXPECT_EQ(o.rfind("Program received signal SIGSEGV (Segmentation fault)", 0), 0u) << o;
  EXPECT_NE(o.find("walk()\n"), std::string::npos);
  EXPECT_NE(o.find("(ChatDBG) p visits\n5\n"), std::string::npos);
  EXPECT_NE(o.find("→ p label\n  0x0\n"), std::string::npos);
  EXPECT_NE(o.find("→ p sizeof(s.marbles)\n  150\n"), std::string::npos);
  EXPECT_NE(o.find("## Recommendation"), std::string::npos);
  EXPECT_TRUE(live_children().empty());
}

TEST(Repl, QuitStopsReading) {
  if (!testkit::have_debugger()) GTEST_SKIP() << "gdb not installed";
  ReplConfig c = scripted_config();
  c.no_lsp = true;
  std::istringstream in("quit\np visits\n");
  std::ostringstream out, err;
  EXPECT_EQ(run_repl(c, in, out, err, false), kExitOk);
  EXPECT_EQ(out.str().find("5\n(ChatDBG)"), std::string::npos);
}

TEST(Repl, MissingKeyIsStartupError) {
  ReplConfig c;
  c.target = testkit::fixture_bin("segfault");
  c.api_key_env = "DBGPILOT_TEST_UNSET_KEY";
  ::unsetenv("DBGPILOT_TEST_UNSET_KEY");
  std::istringstream in;
  std::ostringstream out, err;
  EXPECT_EQ(run_repl(c, in, out, err, false), kExitStartup);
  EXPECT_NE(err.str().find("DBGPILOT_TEST_UNSET_KEY"), std::string::npos);
  EXPECT_TRUE(live_children().empty());
}

TEST(Repl, MissingTargetIsStartupError) {
  if (!testkit::have_debugger()) GTEST_SKIP() << "gdb not installed";
  ReplConfig c = scripted_config();
  c.target = "/nonexistent/program";
  std::istringstream in;
  std::ostringstream out, err;
  EXPECT_EQ(run_repl(c, in, out, err, false), kExitStartup);
  EXPECT_NE(err.str().find("error: "), std::string::npos);
  EXPECT_TRUE(live_children().empty());
}

TEST(Repl, MissingDebuggerIsStartupError) {
  ReplConfig c = scripted_config();
  c.debugger = "definitely-not-a-debugger";
  std::istringstream in;
  std::ostringstream out, err;
  EXPECT_EQ(run_repl(c, in, out, err, false), kExitStartup);
}

TEST(Cli, UsageErrorsExitTwo) {
  const std::string cli = quoted(testkit::cli_path());
  EXPECT_EQ(run_shell(cli + " >/dev/null 2>&1"), kExitUsage);
  EXPECT_EQ(run_shell(cli + " --bogus-flag x >/dev/null 2>&1"), kExitUsage);
  TempFile wl = TempFile::create("wl");
  EXPECT_EQ(run_shell(cli + " --unsafe --whitelist " + quoted(wl.path()) + " x >/dev/null 2>&1"),
            kExitUsage);
  EXPECT_EQ(run_shell(cli + " --version >/dev/null 2>&1"), kExitOk);
}

TEST(Cli, ScriptedRunsAreReproducibleAndLeaveNoProcesses) {
  if (!testkit::have_debugger()) GTEST_SKIP() << "gdb not installed";
  // Uniquely named links let us find the helpers the CLI starts.
  const fs::path dir = fs::temp_directory_path() / ("dbgpilot-cli-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path gdb_link = dir / "gdb-under-test";
  fs::create_symlink(*find_executable("gdb"), gdb_link);
  std::string lsp_flags = " --no-lsp";
  if (testkit::have_clangd()) {
    fs::create_symlink(*find_executable("clangd"), dir / "clangd-under-test");
    lsp_flags = " --clangd " + quoted(dir / "clangd-under-test");
  }
  const fs::path input = dir / "input.txt";
  std::ofstream(input) << "p visits\n" << kQuestion << "\n";

  std::vector<std::string> transcripts, outputs;
  for (int run = 0; run < 2; ++run) {
    const fs::path log = dir / ("transcript" + std::to_string(run) + ".jsonl");
    const fs::path output = dir / ("out" + std::to_string(run) + ".txt");
    const std::string cmd =
        quoted(testkit::cli_path()) + " --script " +
        quoted(testkit::test_data() / "scripts" / "segfault_dialog.json") + " --workspace " +
        quoted(testkit::fixture_src()) + " --debugger " + quoted(gdb_link) + lsp_flags +
        " --log " + quoted(log) + " " + quoted(testkit::fixture_bin("segfault")) + " < " +
        quoted(input) + " > " + quoted(output) + " 2>&1";
    EXPECT_EQ(run_shell(cmd), kExitOk) << testkit::slurp(output);
    transcripts.push_back(testkit::slurp(log));
    outputs.push_back(testkit::slurp(output));
    EXPECT_EQ(processes_mentioning(dir.string()), 0) << "helpers outlived the CLI";
  }
  EXPECT_EQ(transcripts[0], transcripts[1]);
  EXPECT_EQ(outputs[0], outputs[1]);
  EXPECT_NE(outputs[0].find("## Recommendation"), std::string::npos);
  EXPECT_EQ(transcripts[0].find(dir.string()), std::string::npos);
  fs::remove_all(dir);
}
