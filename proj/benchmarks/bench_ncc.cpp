#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "sbench/ncc_tracker.hpp"

using namespace sbench;

static GrayImage noise(int w, int h) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<float> u(0.0f, 255.0f);
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = u(rng);
  return img;
}

static void BM_MatchTemplate(benchmark::State& state) {
  const GrayImage frame = noise(320, 240);
  const int half = static_cast<int>(state.range(0));
  const ViewTemplate t = make_template(frame, {160.0 - half, 120.0 - half, 160.0 + half, 120.0 + half});
  for (auto _ : state) benchmark::DoNotOptimize(match_template(frame, t, {163, 118}, 32));
}
BENCHMARK(BM_MatchTemplate)->Arg(8)->Arg(16);
