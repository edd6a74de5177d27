#include <benchmark/benchmark.h>

#include <cstdlib>
#include <filesystem>
#include <random>

#include "pds/cba.h"
#include "pds/pipeline.h"
#include "pds/stemmer.h"

namespace {

namespace fs = std::filesystem;
const fs::path kData = PDS_DATA_DIR;

void BM_Stem(benchmark::State &state) {
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> len(3, 12);
  std::uniform_int_distribution<int> ch('a', 'z');
  std::vector<std::string> words(4096);
  for (auto &w : words) {
    for (int k = len(rng); k > 0; --k) w += static_cast<char>(ch(rng));
  }
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(pds::stem(words[i++ % words.size()]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Stem);

// Random training table with `range(0)` rows over a small value space.
void BM_MineAndBuild(benchmark::State &state) {
  std::mt19937 rng(2);
  std::uniform_int_distribution<int> kw(0, 40);
  std::uniform_int_distribution<std::size_t> dom(0, pds::prdb_domains().size() - 1);
  std::uniform_int_distribution<int> thr(1, 5);
  std::uniform_int_distribution<int> bit(0, 1);
  std::vector<pds::TrainingRecord> rows;
  for (int i = 0; i < state.range(0); ++i) {
    rows.push_back({"kw" + std::to_string(kw(rng)), pds::prdb_domains()[dom(rng)],
                    bit(rng) ? pds::Context::kHarmful : pds::Context::kHarmless, thr(rng),
                    bit(rng) ? pds::PhishLabel::kYes : pds::PhishLabel::kNo});
  }
  for (auto _ : state) benchmark::DoNotOptimize(pds::train_classifier(rows, {}).rules().size());
}
BENCHMARK(BM_MineAndBuild)->Arg(13)->Arg(110)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ProcessMessage(benchmark::State &state) {
  std::string tmpl = (fs::temp_directory_path() / "pds-bench-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) {
    state.SkipWithError("mkdtemp failed");
    return;
  }
  {
    auto pipe = pds::Pipeline::open(kData, tmpl);
    pipe->monitor().set_participants("b", "alice", "bob");
    const std::vector<std::string> texts = {"what is ur lucky no", "Its pizza", "hello how are u",
                                            "Joe is so fond of chocolates", "whats your favorite teacher name"};
    std::int64_t seq = 0;
    for (auto _ : state) {
      const auto &t = texts[static_cast<std::size_t>(seq) % texts.size()];
      benchmark::DoNotOptimize(pipe->monitor().process_message({"b", ++seq, "alice", t, 0}));
    }
    state.SetItemsProcessed(state.iterations());
  }
  fs::remove_all(tmpl);
}
BENCHMARK(BM_ProcessMessage)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
