#include <random>

#include <benchmark/benchmark.h>

#include "sbench/geometry.hpp"
#include "support/fixtures.hpp"

using namespace sbench;

static void BM_SphereToBBox(benchmark::State& state) {
  const auto c = fixtures::calib();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  std::vector<Point3D> pts;
  for (int i = 0; i < 1024; ++i) pts.push_back({u(rng), u(rng), 200 + u(rng)});
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sphere_to_bbox(pts[i++ & 1023], 2.5, c));
}
BENCHMARK(BM_SphereToBBox);

static void BM_ProjectReproject(benchmark::State& state) {
  const auto c = fixtures::calib();
  const Point3D p{3.5, -7.25, 260};
  for (auto _ : state) {
    const Keypoint2D l = project(p, c, View::Left), r = project(p, c, View::Right);
    benchmark::DoNotOptimize(reproject(l, disparity(l, r), c));
  }
}
BENCHMARK(BM_ProjectReproject);
