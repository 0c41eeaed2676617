#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "sbench/eao.hpp"
#include "sbench/error.hpp"

using namespace sbench;

namespace {

const Score I = std::nullopt;

ScoreSequence seq(std::vector<Score> head, std::size_t length, double fill = 0.0) {
  ScoreSequence s;
  s.entries = std::move(head);
  s.entries.resize(length, fill);
  return s;
}

FrameOutcome2D valid(double combined) {
  FrameOutcome2D o;
  o.status = FrameStatus::Valid;
  o.iou = StereoIou{combined, combined, combined};
  return o;
}

FrameOutcome2D with(FrameStatus s) {
  FrameOutcome2D o;
  o.status = s;
  return o;
}

}  // namespace

TEST(AnchorSequence, PerfectTrackerWithIgnoreFrames) {
  std::vector<FrameOutcome2D> o{valid(1), with(FrameStatus::Ignore), valid(1), with(FrameStatus::ExcessPrediction)};
  EXPECT_EQ(anchor_sequence(o, std::nullopt).entries, (std::vector<Score>{1.0, I, 1.0, I}));
}

TEST(AnchorSequence, ZerosFromStreakStart) {
  std::vector<FrameOutcome2D> o{valid(0.7), valid(0.6), valid(0.05), with(FrameStatus::Ignore), valid(0.05), valid(0.9)};
  const auto s = anchor_sequence(o, FailureEvent{2, 4});
  EXPECT_EQ(s.entries, (std::vector<Score>{0.7, 0.6, 0.0, 0.0, 0.0, 0.0}));
}

TEST(AnchorSequence, NoTargetOnValidFrameIsZero) {
  std::vector<FrameOutcome2D> o{valid(0.5), with(FrameStatus::NoPredictionVisible)};
  EXPECT_EQ(anchor_sequence(o, std::nullopt).entries, (std::vector<Score>{0.5, 0.0}));
}

TEST(Merge, GoldenVideoSequence) {
  const ScoreSequence s1 = seq({1, 0.8, 0.6, 0.5, I}, 100);
  const ScoreSequence s2 = seq({1, 1, 1, I, I}, 50);
  const std::vector<ScoreSequence> in{s1, s2};
  const ScoreSequence v = merge_anchor_sequences(in);
  ASSERT_EQ(v.size(), 100u);
  EXPECT_EQ(v.entries[0], 1.0);
  EXPECT_EQ(v.entries[1], 0.9);
  EXPECT_EQ(v.entries[2], 0.8);
  EXPECT_EQ(v.entries[3], 0.5);
  EXPECT_EQ(v.entries[4], I);
  for (std::size_t t = 5; t < 100; ++t) EXPECT_EQ(v.entries[t], 0.0) << t;
}

TEST(Merge, GoldenSubsetSequence) {
  const ScoreSequence v1 = seq({1, 0.9, 0.8, 0.5, I}, 100);
  const ScoreSequence v2 = seq({1, 1, 1, 0, 0}, 200);
  const std::vector<ScoreSequence> in{v1, v2};
  const ScoreSequence s = merge_video_sequences(in);
  ASSERT_EQ(s.size(), 200u);
  EXPECT_EQ(s.entries[0], 1.0);
  EXPECT_EQ(s.entries[1], 0.95);
  EXPECT_EQ(s.entries[2], 0.9);
  EXPECT_EQ(s.entries[3], 0.25);
  EXPECT_EQ(s.entries[4], 0.0);
  for (std::size_t t = 5; t < 200; ++t) EXPECT_EQ(s.entries[t], 0.0) << t;
}

TEST(Merge, SingleInputIsIdentity) {
  const ScoreSequence s = seq({0.3, I, 0.7}, 10, 0.1);
  const std::vector<ScoreSequence> in{s};
  EXPECT_EQ(merge_sequences(in), s);
}

TEST(Merge, IgnoreYieldsToScore) {
  const std::vector<ScoreSequence> in{seq({1, I}, 2), seq({1, 0.5}, 2)};
  EXPECT_EQ(merge_sequences(in).entries[1], 0.5);
}

TEST(Merge, AllIgnoreColumnStaysIgnore) {
  const std::vector<ScoreSequence> in{seq({1, I, 0.2}, 3), seq({1, I}, 2)};
  EXPECT_EQ(merge_sequences(in).entries[1], I);
}

TEST(Merge, IdenticalInputsAreIdempotent) {
  const ScoreSequence s = seq({0.25, I, 0.75, 0.5}, 8, 0.125);
  const std::vector<ScoreSequence> in{s, s, s};
  EXPECT_EQ(merge_sequences(in), s);
}

TEST(Merge, PermutationInvariant) {
  // dyadic values make every partial sum exact
  std::mt19937_64 rng(1);
  std::vector<ScoreSequence> in;
  for (int k = 0; k < 5; ++k) {
    ScoreSequence s;
    const std::size_t n = 5 + rng() % 20;
    for (std::size_t t = 0; t < n; ++t) s.entries.push_back(rng() % 5 == 0 ? I : Score((rng() % 64) / 64.0));
    in.push_back(s);
  }
  const ScoreSequence ref = merge_sequences(in);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(in.begin(), in.end(), rng);
    EXPECT_EQ(merge_sequences(in), ref);
  }
}

TEST(Merge, EmptyInputThrows) { EXPECT_THROW(merge_sequences(std::span<const ScoreSequence>{}), Error); }

TEST(Window, TwoLengths) {
  const std::vector<int> l{100, 200};
  EXPECT_EQ(eao_window(l), (EaoWindow{100, 200}));
}

TEST(Window, ThreeLengthsPopulationStd) {
  const std::vector<int> l{90, 100, 110};
  EXPECT_EQ(eao_window(l), (EaoWindow{92, 108}));
}

TEST(Window, EqualLengthsWidened) {
  const std::vector<int> l{40, 40, 40};
  EXPECT_EQ(eao_window(l), (EaoWindow{39, 40}));
  const std::vector<int> one{1, 1};
  EXPECT_EQ(eao_window(one), (EaoWindow{1, 2}));
}

TEST(Window, ClampedToLongestAndOne) {
  const std::vector<int> l{1, 1, 1, 100};
  const EaoWindow w = eao_window(l);
  EXPECT_EQ(w.n_min, 1);
  EXPECT_LE(w.n_max, 100);
}

TEST(Window, TooFewVideos) {
  const std::vector<int> l{100};
  EXPECT_THROW(eao_window(l), Error);
}

TEST(Eao, AllOnesIsOne) {
  const ScoreSequence s = seq({}, 50, 1.0);
  EXPECT_EQ(eao(s, {1, 50}), 1.0);
  EXPECT_EQ(eao(s, {7, 23}), 1.0);
}

TEST(Eao, WorkedExample) {
  const ScoreSequence s = seq({1, 0.95, 0.9, 0.25, 0}, 5);
  EXPECT_DOUBLE_EQ(eao(s, {1, 5}), 0.62);
  const ScoreSequence t = seq({1, 0.95, I, 0.25, 0}, 5);
  EXPECT_DOUBLE_EQ(eao(t, {1, 5}), (1 + 0.95 + 0.25 + 0) / 4);
}

TEST(Eao, PastTheEndCountsAsZero) {
  const ScoreSequence s = seq({1, 1}, 2);
  EXPECT_EQ(eao(s, {1, 4}), 0.5);
}

TEST(Eao, LiteralDenominator) {
  const ScoreSequence s = seq({1, 0.95, 0.9, 0.25, 0}, 5);
  EXPECT_DOUBLE_EQ(eao(s, {1, 5}, true), 3.1 / 4);
}

TEST(Eao, AllIgnoreWindowThrows) {
  const ScoreSequence s = seq({1, I, I, 1}, 4);
  EXPECT_THROW(eao(s, {2, 3}), Error);
}

TEST(Eao, IgnoreColumnsDoNotChangeScore) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    ScoreSequence s;
    for (int t = 0; t < 30; ++t) s.entries.push_back(Score((rng() % 32) / 32.0));
    const EaoWindow w{5, 20};
    const double base = eao(s, w);
    ScoreSequence t = s;
    const int at = 5 + static_cast<int>(rng() % 15);
    t.entries.insert(t.entries.begin() + at, I);
    EXPECT_EQ(eao(t, {5, 21}), base);
  }
}

TEST(Eao, Monotonic) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    ScoreSequence s;
    for (int t = 0; t < 20; ++t) s.entries.push_back(u(rng) < 0.2 ? I : Score(u(rng) * 0.9));
    s.entries[3] = 0.2;
    const EaoWindow w{2, 15};
    const double before = eao(s, w);
    const std::size_t k = 1 + rng() % 14;
    if (!s.entries[k]) continue;
    s.entries[k] = *s.entries[k] + 0.1 * u(rng);
    EXPECT_GE(eao(s, w), before);
  }
}

TEST(WeightedAverage, Examples) {
  const std::vector<double> v{0.8, 0.6}, w{100, 50};
  EXPECT_DOUBLE_EQ(weighted_average(v, w), 0.8 * 100 / 150 + 0.6 * 50 / 150);
  EXPECT_NEAR(weighted_average(v, w), 0.7333333333, 1e-10);
  const std::vector<double> one{0.42}, w1{3};
  EXPECT_EQ(weighted_average(one, w1), 0.42);
  const std::vector<double> three{0.25, 0.5, 0.75}, eq{2, 2, 2};
  EXPECT_EQ(weighted_average(three, eq), 0.5);
}

TEST(WeightedAverage, Errors) {
  const std::vector<double> v{1, 2}, zero{0, 0}, short_w{1};
  EXPECT_THROW(weighted_average(v, zero), Error);
  EXPECT_THROW(weighted_average(v, short_w), Error);
  const std::vector<std::optional<double>> undefined{std::nullopt, 0.5};
  const std::vector<double> w{10, 0};
  EXPECT_FALSE(weighted_average(undefined, w));
}

TEST(WeightedStddev, PopulationForm) {
  const std::vector<std::optional<double>> v{1.0, 3.0};
  const std::vector<double> w{1, 1};
  EXPECT_EQ(*weighted_stddev(v, w), 1.0);
  const std::vector<double> w2{3, 1};
  EXPECT_DOUBLE_EQ(*weighted_stddev(v, w2), std::sqrt(0.75));
}
