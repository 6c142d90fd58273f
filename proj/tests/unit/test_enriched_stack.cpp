#include <gtest/gtest.h>

#include <random>

#include "dbgpilot/enriched_stack.hpp"
#include "dbgpilot/errors.hpp"
#include "fake_target.hpp"
#include "paths.hpp"

namespace fs = std::filesystem;
using namespace dbgpilot;
using testkit::FakeTarget;

namespace {

EnrichOptions fixture_options() {
  EnrichOptions o;
  o.workspace_root = testkit::fixture_src();
  return o;
}

Frame user_frame(int index, const std::string& fn, int line) {
  return Frame{index, fn, testkit::fixture_src() / "segfault.c", line, "0x1"};
}

Frame library_frame(int index) {
  if (index % 2) return Frame{index, "__libc_thing", std::nullopt, std::nullopt, "0x2"};
  return Frame{index, "qsort_r", fs::path("/usr/src/glibc/msort.c"), 300, "0x3"};
}

std::string int_array(std::size_t n) {
  std::string out = "{";
  for (std::size_t i = 0; i < n; ++i) out += (i ? ", " : "") + std::to_string(i);
  return out + "}";
}

std::string expected_int_array(std::size_t n) {
  std::vector<std::string> shown;
  for (std::size_t i = 0; i < n; ++i) {
    if (n > 6 && i == 3) {
      shown.push_back("...");
      i = n - 4;
      continue;
    }
    shown.push_back(std::to_string(i));
  }
  std::string out = "[";
  for (std::size_t i = 0; i < shown.size(); ++i) out += (i ? ", " : "") + shown[i];
  return out + "]";
}

std::string nested(int d) { return d == 0 ? "7" : "{f = " + nested(d - 1) + "}"; }

// Nesting depth of shown contents; an elided "{...}" shows nothing.
int rendered_depth(std::string text) {
  for (const char* elided : {"{...}", "[...]"}) {
    for (auto pos = text.find(elided); pos != std::string::npos; pos = text.find(elided)) {
      text.replace(pos, 5, "...");
    }
  }
  int depth = 0, best = 0;
  for (char c : text) {
    if (c == '{' || c == '[') best = std::max(best, ++depth);
    if (c == '}' || c == ']') --depth;
  }
  return best;
}

}  // namespace

TEST(EnrichedStack, NotStoppedRejected) {
  FakeTarget t;
  t.stopped = false;
  try {
    build_enriched_stack(t, fixture_options());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotStopped);
  }
}

TEST(EnrichedStack, LibraryFramesCollapseIntoMarkers) {
  FakeTarget t;
  t.frames = {library_frame(0), library_frame(1), user_frame(2, "walk", 36),
              library_frame(3), user_frame(4, "main", 54)};
  auto s = build_enriched_stack(t, fixture_options());
  ASSERT_EQ(s.entries.size(), 4u);
  EXPECT_TRUE(std::holds_alternative<EnrichedFrame>(s.entries[0]));
  EXPECT_EQ(std::get<ElisionMarker>(s.entries[1]).hidden, 1u);
  EXPECT_EQ(std::get<ElisionMarker>(s.entries[3]).hidden, 2u);
  EXPECT_EQ(s.shown_frames(), 2u);
  EXPECT_EQ(s.hidden_frames(), 3u);
  auto blocks = s.blocks();
  EXPECT_EQ(blocks[1], "[... skipping 1 hidden frame(s)]\n");
  EXPECT_EQ(blocks[2].rfind("> ./segfault.c(36)walk()\n", 0), 0u);
  EXPECT_EQ(blocks[0].rfind("./segfault.c(54)main()\n", 0), 0u);
}

TEST(EnrichedStack, FramesBeyondCapCountAsHidden) {
  FakeTarget t;
  t.frames = {user_frame(0, "walk", 36), user_frame(1, "walk", 39)};
  t.depth = 10;
  auto s = build_enriched_stack(t, fixture_options());
  EXPECT_EQ(s.total_frames, 10u);
  EXPECT_EQ(s.shown_frames() + s.hidden_frames(), 10u);
  EXPECT_EQ(std::get<ElisionMarker>(s.entries.front()).hidden, 8u);
}

TEST(EnrichedStack, WindowsMatchSharedRenderer) {
  FakeTarget t;
  t.frames = {user_frame(0, "walk", 36)};
  auto s = build_enriched_stack(t, fixture_options());
  const auto& f = std::get<EnrichedFrame>(s.entries[0]);
  ASSERT_TRUE(f.window);
  EXPECT_EQ(*f.window, source_window(testkit::fixture_src() / "segfault.c", 36));
}

TEST(EnrichedStack, GlobalsOnOutermostUserFrameOnly) {
  FakeTarget t;
  t.frames = {user_frame(0, "walk", 36), user_frame(1, "main", 54)};
  t.variables[1] = {{"num_trials", "int", "5", false}, {"s", "struct sample", "{head = 0x0}", false}};
  const fs::path src = testkit::fixture_src() / "segfault.c";
  t.globals = {{"fixture_name", "const char *", src, 19},
               {"visits", "int", src, 18},
               {"printf", "int", fs::path("/usr/include/stdio.h"), 1}};
  t.values = {{"fixture_name", "0x4 \"segfault\""}, {"visits", "5"}, {"printf", "0"}};
  auto s = build_enriched_stack(t, fixture_options());
  const auto& outer = std::get<EnrichedFrame>(s.entries[0]);
  const auto& inner = std::get<EnrichedFrame>(s.entries[1]);
  ASSERT_TRUE(outer.globals);
  ASSERT_EQ(outer.globals->size(), 1u);  // main's body mentions fixture_name, not visits
  EXPECT_EQ((*outer.globals)[0].name, "fixture_name");
  EXPECT_FALSE(inner.globals);
  EXPECT_NE(s.render().find("   Global variables:\n     fixture_name: const char * = 0x4 \"segfault\"\n"),
            std::string::npos);
}

TEST(EnrichedStackGolden, MatchesReviewedRenderings) {
  if (!testkit::have_debugger()) GTEST_SKIP() << "gdb not installed";
  for (const std::string name : {"segfault", "divzero", "assert_abort", "qsort_crash"}) {
    DebuggerSession session = testkit::stopped_fixture(name);
    const std::string actual = build_enriched_stack(session, fixture_options()).render();
    const std::string golden = testkit::slurp(testkit::test_data() / "goldens" / (name + ".txt"));
    EXPECT_EQ(actual, golden) << name;
  }
}

TEST(EnrichedStackProperty, SyntheticBacktraces) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> frame_count(1, 14);
  std::uniform_int_distribution<int> coin(0, 2);
  std::uniform_int_distribution<int> extra_depth(0, 6);
  std::uniform_int_distribution<int> array_len(1, 30);
  std::uniform_int_distribution<int> nest(0, 7);
  std::uniform_int_distribution<int> line(1, 57);

  for (int trial = 0; trial < 1000; ++trial) {
    FakeTarget t;
    const int n = frame_count(rng);
    std::vector<std::size_t> array_sizes;
    std::vector<int> depths;
    for (int i = 0; i < n; ++i) {
      if (coin(rng) == 0) {
        t.frames.push_back(library_frame(i));
        continue;
      }
      t.frames.push_back(user_frame(i, "walk", line(rng)));
      const std::size_t len = array_len(rng);
      const int d = nest(rng);
      t.variables[i] = {{"a", "int [" + std::to_string(len) + "]", int_array(len), false},
                        {"n", "struct n", nested(d), false}};
      array_sizes.push_back(len);
      depths.push_back(d);
    }
    t.depth = t.frames.size() + (coin(rng) == 0 ? extra_depth(rng) : 0);

    auto s = build_enriched_stack(t, fixture_options());
    // frame conservation
    EXPECT_EQ(s.shown_frames() + s.hidden_frames(), s.total_frames);
    EXPECT_EQ(s.total_frames, t.stack_depth());
    // no two markers in a row, and markers never empty
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
      if (const auto* m = std::get_if<ElisionMarker>(&s.entries[i])) {
        EXPECT_GT(m->hidden, 0u);
        if (i + 1 < s.entries.size()) {
          EXPECT_FALSE(std::holds_alternative<ElisionMarker>(s.entries[i + 1]));
        }
      }
    }
    // bindings: width rule exactly, depth bounded; entries are outermost-first
    std::size_t k = array_sizes.size();
    int last_index = static_cast<int>(t.frames.size());
    for (const auto& entry : s.entries) {
      const auto* f = std::get_if<EnrichedFrame>(&entry);
      if (!f) continue;
      EXPECT_LT(f->frame.index, last_index);
      last_index = f->frame.index;
      ASSERT_GT(k, 0u);
      --k;
      ASSERT_EQ(f->bindings.size(), 2u);
      EXPECT_EQ(f->bindings[0].value.text, expected_int_array(array_sizes[k]));
      EXPECT_EQ(f->bindings[0].value.truncated, array_sizes[k] > 6);
      EXPECT_LE(rendered_depth(f->bindings[1].value.text), 3);
      EXPECT_LE(f->bindings[1].value.depth_reached, 3);
      EXPECT_EQ(f->bindings[1].value.truncated, depths[k] > 3);
    }
    EXPECT_EQ(k, 0u);
  }
}
