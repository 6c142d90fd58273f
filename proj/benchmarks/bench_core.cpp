#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dbgpilot/lsp/framing.hpp"
#include "dbgpilot/mi/record.hpp"
#include "dbgpilot/prompt.hpp"
#include "dbgpilot/sanitizer.hpp"
#include "dbgpilot/value_render.hpp"

namespace fs = std::filesystem;
using namespace dbgpilot;

namespace {

const std::vector<std::string>& corpus() {
  static const std::vector<std::string> lines = [] {
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(DBGPILOT_MI_CORPUS_DIR)) {
      std::ifstream in(entry.path());
      for (std::string line; std::getline(in, line);) out.push_back(line);
    }
    return out;
  }();
  return lines;
}

void BM_MiParseCorpus(benchmark::State& state) {
  const auto& lines = corpus();
  std::size_t bytes = 0;
  for (const auto& l : lines) bytes += l.size();
  for (auto _ : state) {
    for (const auto& l : lines) benchmark::DoNotOptimize(mi::parse_line(l));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * bytes));
}
BENCHMARK(BM_MiParseCorpus);

void BM_MiRoundTrip(benchmark::State& state) {
  const auto& lines = corpus();
  for (auto _ : state) {
    for (const auto& l : lines) benchmark::DoNotOptimize(mi::serialize(mi::parse_line(l)));
  }
}
BENCHMARK(BM_MiRoundTrip);

void BM_RenderNestedValue(benchmark::State& state) {
  std::string raw = "{";
  for (int i = 0; i < state.range(0); ++i) {
    if (i) raw += ", ";
    raw += "{id = " + std::to_string(i) + ", name = 0x4005d0 \"node\", next = 0x0}";
  }
  raw += "}";
  for (auto _ : state) benchmark::DoNotOptimize(render_value_text(raw));
}
BENCHMARK(BM_RenderNestedValue)->Arg(4)->Arg(64)->Arg(1024);

void BM_Sanitize(benchmark::State& state) {
  const auto policy = SanitizerPolicy::native_strict();
  const std::vector<std::string> commands = {
      "p visits", "p sizeof(s.marbles)", "call unlink(\"x\")", "p x += 1",
      "info locals", "p (*fn)(3)", "x/16xb target->label", "p a == b && c <= d"};
  for (auto _ : state) {
    for (const auto& c : commands) benchmark::DoNotOptimize(sanitize(c, policy));
  }
}
BENCHMARK(BM_Sanitize);

void BM_FitToBudget(benchmark::State& state) {
  PromptBundle b;
  b.instructions = instructions_text();
  for (int i = 0; i < 40; ++i) b.stack_blocks.push_back(std::string(600, 'f'));
  b.inputs = std::string(2000, 'i');
  b.error = "Program received signal SIGSEGV, Segmentation fault.";
  for (int i = 0; i < 30; ++i) b.history.push_back({"p x" + std::to_string(i), std::string(300, 'o')});
  b.user_text = "Why did this crash?";
  TokenBudget budget;
  budget.max_tokens = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_to_budget(b, budget));
}
BENCHMARK(BM_FitToBudget)->Arg(3000)->Arg(8000)->Arg(16000);

void BM_LspFrameDecode(benchmark::State& state) {
  std::string stream;
  for (int i = 0; i < 100; ++i) {
    stream += lsp::encode_frame(R"({"jsonrpc":"2.0","id":)" + std::to_string(i) +
                                R"(,"result":{"uri":"file:///w/a.c","range":{}}})");
  }
  for (auto _ : state) {
    lsp::FrameDecoder d;
    for (std::size_t pos = 0; pos < stream.size(); pos += 512) {
      d.feed(std::string_view(stream).substr(pos, 512));
      while (auto body = d.next()) benchmark::DoNotOptimize(body);
    }
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * stream.size()));
}
BENCHMARK(BM_LspFrameDecode);

}  // namespace

BENCHMARK_MAIN();
