#include <random>

#include <benchmark/benchmark.h>

#include "sbench/eao.hpp"
#include "sbench/metrics2d.hpp"
#include "sbench/scoring.hpp"
#include "support/fixtures.hpp"

using namespace sbench;

static void BM_Iou(benchmark::State& state) {
  const BBox a{10, 10, 30, 28}, b{14, 12, 33, 31};
  for (auto _ : state) benchmark::DoNotOptimize(iou(a, b));
}
BENCHMARK(BM_Iou);

static std::vector<ScoreSequence> random_sequences(int count, int length) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScoreSequence> out(static_cast<std::size_t>(count));
  for (auto& s : out) {
    const int n = length / 2 + static_cast<int>(u(rng) * length / 2);
    for (int t = 0; t < n; ++t) s.entries.push_back(u(rng) < 0.05 ? Score{} : Score{u(rng)});
  }
  return out;
}

static void BM_MergeSequences(benchmark::State& state) {
  const auto in = random_sequences(static_cast<int>(state.range(0)), 1000);
  for (auto _ : state) benchmark::DoNotOptimize(merge_sequences(in));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MergeSequences)->Arg(10)->Arg(100);

static void BM_Eao(benchmark::State& state) {
  const auto in = random_sequences(50, 1000);
  const ScoreSequence merged = merge_sequences(in);
  for (auto _ : state) benchmark::DoNotOptimize(eao(merged, {200, 800}));
}
BENCHMARK(BM_Eao);

static void BM_ScoreAnchor(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const VideoRecord v = fixtures::random_video(rng, "case", "video");
  const AnchorRun run = fixtures::random_run(rng, v, 0);
  const EvalConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(score_anchor(run, v, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(run.predictions.size()));
}
BENCHMARK(BM_ScoreAnchor);
