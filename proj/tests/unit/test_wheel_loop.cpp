#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>

#include "dbgpilot/errors.hpp"
#include "dbgpilot/llm/scripted.hpp"
#include "dbgpilot/process.hpp"
#include "dbgpilot/wheel_loop.hpp"
#include "fake_target.hpp"
#include "paths.hpp"

namespace fs = std::filesystem;
using namespace dbgpilot;
using namespace dbgpilot::llm;
using nlohmann::json;
using testkit::FakeTarget;

namespace {

// Backend driven by a callback, for turns that scripts cannot express.
class LambdaBackend final : public Backend {
 public:
  using Fn = std::function<void(const std::vector<ChatMessage>&, const EventSink&)>;
  explicit LambdaBackend(Fn fn) : fn_(std::move(fn)) {}
  void complete(const std::vector<ChatMessage>& messages, const std::vector<ToolSpec>&,
                const ModelConfig&, const EventSink& sink) override {
    ++calls;
    fn_(messages, sink);
  }
  std::string describe() const override { return "lambda"; }
  int calls = 0;

 private:
  Fn fn_;
};

ToolCallRequest debug_call(const std::string& id, const std::string& command) {
  json args = {{"command", command}};
  return make_tool_call(id, "debug", args.dump(), default_tools());
}

FakeTarget segv_target() {
  FakeTarget t;
  t.stop.reason = StopReason::Signal;
  t.stop.signal_name = "SIGSEGV";
  t.stop.signal_meaning = "Segmentation fault";
  t.frames = {Frame{0, "walk", testkit::fixture_src() / "segfault.c", 36, "0x1"},
              Frame{1, "main", testkit::fixture_src() / "segfault.c", 54, "0x2"}};
  t.stop.frame = t.frames[0];
  t.console["p num_trials"] = "$1 = 5\n";
  return t;
}

WheelOptions options() {
  WheelOptions o;
  o.enrich.workspace_root = testkit::fixture_src();
  return o;
}

std::string script_turns(const json& turns) {
  return json{{"version", 1}, {"turns", turns}}.dump();
}

struct Harness {
  FakeTarget target = segv_target();
  SourceNavigator nav{testkit::fixture_src(), {}, &target, {}};
  std::ostringstream out;
};

}  // namespace

TEST(WheelLoop, DebuggerCommandsRecognised) {
  for (const char* cmd : {"bt", "p x", "p/x flags", "print s", "frame 2", "info locals", "list",
                          "code segfault.c:3", "definition a.c:1 f", "  up", "x/4x $sp",
                          "continue", "run", "break main"}) {
    EXPECT_TRUE(is_debugger_command(cmd)) << cmd;
  }
  for (const char* q : {"", "   ", "why is label null?", "What happened", "explain", "pp x",
                        "print-me"}) {
    EXPECT_FALSE(is_debugger_command(q)) << q;
  }
}

TEST(WheelLoop, PrintOutputLosesValueHistoryPrefix) {
  EXPECT_EQ(tidy_print_output("p x", "$12 = 5\n"), "5\n");
  EXPECT_EQ(tidy_print_output("print/x y", "$1 = 0x10\n"), "0x10\n");
  EXPECT_EQ(tidy_print_output("bt", "$1 = 5\n"), "$1 = 5\n");
  EXPECT_EQ(tidy_print_output("p x", "$1 = {a = $2 = 3}\n"), "{a = $2 = 3}\n");
}

TEST(WheelLoop, AssistantPrinterLayout) {
  std::ostringstream out;
  AssistantPrinter p(out);
  p.prose("Looking.");
  p.echo("p x", "5\nsecond\n");
  p.prose("Done.");
  p.notice("stopped");
  p.finish();
  EXPECT_EQ(out.str(), "Looking.\n\n→ p x\n  5\n  second\n\nDone.\n\n[stopped]\n\n");
}

TEST(WheelLoop, HistoryGoesIntoNextPromptOnly) {
  Harness h;
  auto backend = ScriptedBackend::from_string(script_turns(
      json::array({json::array({{{"text", "First answer."}}}),
                   json::array({{{"text", "Second answer."}}})})));
  WheelLoop loop(h.target, backend, h.nav, SanitizerPolicy::native_strict(), options(), h.out);
  loop.handle_input("p num_trials");
  EXPECT_NE(h.out.str().find("5\n"), std::string::npos);
  EXPECT_EQ(h.out.str().find("$1"), std::string::npos);
  ASSERT_EQ(loop.history().size(), 1u);

  auto first = loop.build_prompt("why?");
  ASSERT_EQ(first.size(), 2u);
  EXPECT_NE(first[1].content.find("(ChatDBG) p num_trials\n5\n"), std::string::npos);
  loop.run_chat_turn(first);
  EXPECT_TRUE(loop.history().empty());
  EXPECT_TRUE(loop.chat_in_progress());

  loop.handle_input("bt");
  auto follow = loop.build_prompt("and now?");
  ASSERT_EQ(follow.size(), 1u);
  EXPECT_EQ(follow[0].content.find("p num_trials"), std::string::npos);
  EXPECT_NE(follow[0].content.find("(ChatDBG) bt\n"), std::string::npos);
  loop.run_chat_turn(follow);
  EXPECT_EQ(loop.turn_count(), 2u);
  EXPECT_EQ(validate_conversation(loop.messages()), std::nullopt);
  EXPECT_EQ(loop.messages()[0].role, Role::System);
}

TEST(WheelLoop, ProseOnlyTurn) {
  Harness h;
  auto backend = ScriptedBackend::from_string(
      script_turns(json::array({json::array({{{"text", "## Recommendation\nCheck label."}}})})));
  WheelLoop loop(h.target, backend, h.nav, SanitizerPolicy::native_strict(), options(), h.out);
  TurnResult r = loop.run_chat_turn(loop.build_prompt("why?"));
  EXPECT_EQ(r.end, TurnEnd::Done);
  EXPECT_EQ(r.tool_calls, 0u);
  EXPECT_EQ(r.text, "## Recommendation\nCheck label.");
  EXPECT_EQ(h.out.str(), "## Recommendation\nCheck label.\n");
  EXPECT_TRUE(h.target.console_log.empty());
}

TEST(WheelLoop, DeniedCommandIsNeverRun) {
  Harness h;
  auto backend = ScriptedBackend::from_string(script_turns(json::array(
      {json::array({{{"tool_call", {{"name", "debug"}, {"arguments", {{"command", "call unlink(\"x\")"}}}}}},
                    {{"tool_call", {{"name", "debug"}, {"arguments", {{"command", "p num_trials"}}}}}}}),
       json::array({{{"text", "ok"}}})})));
  WheelLoop loop(h.target, backend, h.nav, SanitizerPolicy::native_strict(), options(), h.out);
  TurnResult r = loop.run_chat_turn(loop.build_prompt("why?"));
  EXPECT_EQ(r.end, TurnEnd::Done);
  EXPECT_EQ(h.target.console_log, std::vector<std::string>{"p num_trials"});
  const auto& msgs = loop.messages();
  auto denial = std::find_if(msgs.begin(), msgs.end(), [](const ChatMessage& m) {
    return m.role == Role::Tool && m.tool_call_id == "call_1_1";
  });
  ASSERT_NE(denial, msgs.end());
  EXPECT_EQ(denial->content,
            "The command was not run: function call to 'unlink' is not allowed.");
  EXPECT_NE(h.out.str().find("→ call unlink(\"x\")\n  The command was not run"), std::string::npos);
  EXPECT_EQ(validate_conversation(msgs), std::nullopt);
}

TEST(WheelLoop, MalformedCallAnsweredWithError) {
  Harness h;
  auto backend = ScriptedBackend::from_string(script_turns(json::array(
      {json::array({{{"tool_call", {{"name", "debug"}, {"arguments_raw", "{nope"}}}}}),
       json::array({{{"text", "ok"}}})})));
  WheelLoop loop(h.target, backend, h.nav, SanitizerPolicy::native_strict(), options(), h.out);
  TurnResult r = loop.run_chat_turn(loop.build_prompt("why?"));
  EXPECT_EQ(r.end, TurnEnd::Done);
  EXPECT_TRUE(h.target.console_log.empty());
  const auto& tool = loop.messages()[3];
  ASSERT_EQ(tool.role, Role::Tool);
  EXPECT_EQ(tool.content.rfind("error: ", 0), 0u);
  EXPECT_EQ(validate_conversation(loop.messages()), std::nullopt);
}

TEST(WheelLoop, ToolCallCapStopsTheTurn) {
  Harness h;
  LambdaBackend backend([](const std::vector<ChatMessage>& msgs, const EventSink& sink) {
    // one more call every time, forever
    sink(ToolCallEvent{debug_call("c" + std::to_string(msgs.size()), "bt")});
    sink(Done{"tool_calls"});
  });
  WheelLoop loop(h.target, backend, h.nav, SanitizerPolicy::native_strict(), options(), h.out);
  TurnResult r = loop.run_chat_turn(loop.build_prompt("why?"));
  EXPECT_EQ(r.end, TurnEnd::ToolCap);
  EXPECT_EQ(r.tool_calls, 16u);
  EXPECT_EQ(h.target.console_log.size(), 16u);
  EXPECT_EQ(backend.calls, 17);
  EXPECT_EQ(validate_conversation(loop.messages()), std::nullopt);
  EXPECT_NE(h.out.str().find("[stopped: the model asked for more than 16 function calls in one turn]"),
            std::string::npos);
}

TEST(WheelLoop, CapAlsoAppliesWithinOneResponse) {
  Harness h;
  WheelOptions o = options();
  o.tool_call_cap = 3;
  LambdaBackend backend([](const std::vector<ChatMessage>&, const EventSink& sink) {
    for (int i = 0; i < 5; ++i) sink(ToolCallEvent{debug_call("c" + std::to_string(i), "bt")});
    sink(Done{"tool_calls"});
  });
  WheelLoop loop(h.target, backend, h.nav, SanitizerPolicy::native_strict(), o, h.out);
  TurnResult r = loop.run_chat_turn(loop.build_prompt("why?"));
  EXPECT_EQ(r.end, TurnEnd::ToolCap);
  EXPECT_EQ(r.tool_calls, 3u);
  EXPECT_EQ(h.target.console_log.size(), 3u);
  EXPECT_EQ(validate_conversation(loop.messages()), std::nullopt);
}

TEST(WheelLoop, TransportErrorEndsTurnAndLoopContinues) {
  Harness h;
  LambdaBackend backend([](const std::vector<ChatMessage>&, const EventSink& sink) {
    sink(TextDelta{"Partial "});
    throw Error(Errc::TransportError, "connection reset");
  });
  WheelLoop loop(h.target, backend, h.nav, SanitizerPolicy::native_strict(), options(), h.out);
  loop.handle_input("why?");
  EXPECT_NE(h.out.str().find("Partial \n\n[error: connection reset]\n"), std::string::npos);
  loop.handle_input("bt");
  EXPECT_EQ(h.target.console_log.back(), "bt");
}

TEST(WheelLoop, BudgetFailureReportedNotThrown) {
  Harness h;
  auto backend = ScriptedBackend::from_string(script_turns(json::array()));
  WheelOptions o = options();
  o.budget.max_tokens = 5;
  WheelLoop loop(h.target, backend, h.nav, SanitizerPolicy::native_strict(), o, h.out);
  EXPECT_NO_THROW(loop.handle_input("why?"));
  EXPECT_NE(h.out.str().find("error: "), std::string::npos);
  EXPECT_EQ(backend.turns_used(), 0u);
}

TEST(WheelLoop, LocalToolsForUser) {
  Harness h;
  h.target.symbols["walk"] = SourceLoc{testkit::fixture_src() / "segfault.c", 32};
  auto backend = ScriptedBackend::from_string(script_turns(json::array()));
  WheelLoop loop(h.target, backend, h.nav, SanitizerPolicy::native_strict(), options(), h.out);
  loop.handle_input("code segfault.c:36");
  loop.handle_input("definition segfault.c:39 walk");
  loop.handle_input("definition segfault.c:39");
  EXPECT_NE(h.out.str().find("---> 36"), std::string::npos);
  EXPECT_NE(h.out.str().find("segfault.c:32\n"), std::string::npos);
  EXPECT_NE(h.out.str().find("error: usage: definition"), std::string::npos);
  EXPECT_EQ(loop.history().size(), 3u);
  EXPECT_TRUE(h.target.console_log.empty());
}

// The checked-in three-turn dialog against the live segfault fixture.
TEST(WheelLoopLive, ScriptedDialogIsDeterministic) {
  if (!testkit::have_debugger()) GTEST_SKIP() << "gdb not installed";
  std::vector<std::string> transcripts;
  std::vector<std::string> outputs;
  for (int run = 0; run < 2; ++run) {
    TempFile log = TempFile::create("transcript");
    DebuggerSession session = testkit::stopped_fixture("segfault");
    session.execute_console("frame 1");
    SourceNavigator nav(testkit::fixture_src(), {}, &session, {});
    auto backend = ScriptedBackend::from_file(testkit::test_data() / "scripts" / "segfault_dialog.json");
    std::ostringstream out;
    {
      Transcript transcript(log.path());
      WheelLoop loop(session, backend, nav, SanitizerPolicy::native_strict(), options(), out,
                     &transcript);
      loop.handle_input("p visits");
      loop.handle_input("Why is label null, and how many marbles are there?");
      EXPECT_EQ(validate_conversation(loop.messages()), std::nullopt);
      EXPECT_TRUE(loop.history().empty());
    }
    transcripts.push_back(testkit::slurp(log.path()));
    outputs.push_back(out.str());
    session.shutdown();
  }
  EXPECT_EQ(transcripts[0], transcripts[1]);
  EXPECT_EQ(outputs[0], outputs[1]);
  const std::string& out = outputs[0];

  // Audit the transcript: every executed call is echoed with all of its
  // output, and the question's prompt carries the command typed before it.
  std::vector<json> entries;
  std::istringstream lines(transcripts[0]);
  for (std::string line; std::getline(lines, line);) entries.push_back(json::parse(line));
  std::map<std::string, json> calls;
  std::size_t executed = 0;
  bool saw_150 = false;
  std::size_t prompts = 0;
  for (const auto& e : entries) {
    if (e["type"] == "tool_call") calls[e["id"]] = e;
    if (e["type"] == "prompt") {
      ++prompts;
      const std::string user = e["messages"].back()["content"];
      EXPECT_NE(user.find("(ChatDBG) p visits\n5\n"), std::string::npos);
    }
    if (e["type"] != "tool_result" || !e["executed"].get<bool>()) continue;
    ++executed;
    const json& call = calls.at(e["id"]);
    const json& args = call["arguments"];
    std::string shown = call["name"] == "debug" ? args["command"].get<std::string>()
                        : call["name"] == "code"
                            ? "code " + args["loc"].get<std::string>()
                            : "definition " + args["loc"].get<std::string>() + " " +
                                  args["symbol"].get<std::string>();
    std::string block = "→ " + shown + "\n";
    std::istringstream body(e["output"].get<std::string>());
    for (std::string l; std::getline(body, l);) block += (l.empty() ? "" : "  ") + l + "\n";
    EXPECT_NE(out.find(block), std::string::npos) << block;
    if (e["output"] == "150\n") saw_150 = true;
  }
  EXPECT_EQ(prompts, 1u);
  EXPECT_GE(executed, 3u);
  EXPECT_TRUE(saw_150);
  EXPECT_EQ(entries.back()["type"], "turn_end");
  EXPECT_NE(out.find("## Recommendation"), std::string::npos);
}

// Whatever the model asks, the stop the user is looking at stays put.
TEST(WheelLoopLive, StopStatePreservedOverManyTurns) {
  if (!testkit::have_debugger()) GTEST_SKIP() << "gdb not installed";
  const std::vector<std::string> commands = {
      "bt", "up", "down", "frame 1", "p label", "p depth", "info locals", "p visits",
      "run", "continue", "next", "step", "kill", "set var visits = 0", "p visits = 9",
      "p visits++", "call free(0)", "p strlen(\"x\")", "x/4xb $sp", "list", "p $pc",
      "finish", "jump 40", "signal 0", "p fixture_name", "ptype struct node", "p count",
      "p values[0]", "info frame", "p len = 0", "call abort()", "start", "until", "return"};
  std::mt19937 rng(17);
  std::uniform_int_distribution<std::size_t> pick(0, commands.size() - 1);
  std::uniform_int_distribution<int> per_turn(0, 4);
  for (const std::string fixture : {"segfault", "divzero", "assert_abort"}) {
    DebuggerSession session = testkit::stopped_fixture(fixture);
    const auto before = session.backtrace();
    const StopEvent stop = session.last_stop();
    SourceNavigator nav(testkit::fixture_src(), {}, &session, {});
    int turn = 0;
    LambdaBackend backend([&](const std::vector<ChatMessage>& msgs, const EventSink& sink) {
      if (msgs.back().role == Role::Tool) {
        sink(TextDelta{"done"});
        sink(Done{"stop"});
        return;
      }
      for (int i = per_turn(rng); i > 0; --i) {
        sink(ToolCallEvent{debug_call("t" + std::to_string(turn) + "_" + std::to_string(i),
                                      commands[pick(rng)])});
      }
      sink(Done{"tool_calls"});
    });
    std::ostringstream out;
    WheelLoop loop(session, backend, nav, SanitizerPolicy::native_strict(), options(), out);
    for (turn = 0; turn < 100; ++turn) {
      loop.handle_input("what now?");
      ASSERT_TRUE(session.is_stopped()) << fixture << " turn " << turn;
      ASSERT_EQ(session.last_stop(), stop) << fixture << " turn " << turn;
      ASSERT_EQ(session.backtrace(), before) << fixture << " turn " << turn;
    }
    EXPECT_EQ(validate_conversation(loop.messages()), std::nullopt);
    session.shutdown();
  }
}
