#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "../support/compare.hpp"
#include "../support/fixtures.hpp"
#include "sbench/metrics2d.hpp"
#include "sbench/scoring.hpp"

using namespace sbench;
using namespace fixtures;

namespace {

RunSet random_runs(std::mt19937_64& rng, const SubsetRecord& s) {
  RunSet runs;
  for (const VideoRecord* v : s.videos())
    for (int a : v->anchors) runs[v->key()].push_back(random_run(rng, *v, a));
  return runs;
}

}  // namespace

TEST(ReferenceEquivalence, RandomRunsMatchExactly) {
  std::mt19937_64 rng(2024);
  int anchors = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const SubsetRecord s = random_subset(rng, 1 + trial % 3, 1 + trial % 4);
    const RunSet runs = random_runs(rng, s);
    EvalConfig cfg;
    if (trial % 5 == 3) cfg.stereo_iou_combine = StereoIouCombine::Min;
    if (trial % 7 == 4) cfg.eao_literal_denominator = true;
    if (trial % 4 == 1) cfg.fail_streak = 3;
    const MetricsReport got = score_runs(s, runs, cfg, "t");
    const Mismatches m = compare(got, ref::score(s, runs, thresholds(cfg)));
    for (const auto& line : m.list) ADD_FAILURE() << "trial " << trial << ": " << line;
    anchors += m.anchors;
  }
  EXPECT_GT(anchors, 100);
}

TEST(ReferenceEquivalence, RandomRunsExerciseEveryBranch) {
  std::mt19937_64 rng(7);
  const SubsetRecord s = random_subset(rng, 2, 3);
  const RunSet runs = random_runs(rng, s);
  const MetricsReport r = score_runs(s, runs, {}, "t");
  int fail2d = 0, fail3d = 0, clean = 0, excess = 0;
  for (const auto& v : r.videos)
    for (const auto& a : v.anchors) {
      fail2d += a.r2d.failure.has_value();
      fail3d += a.r3d.failure.has_value();
      clean += !a.r2d.failure.has_value();
      excess += a.r2d.n_excess > 0;
    }
  EXPECT_GT(fail2d, 0);
  EXPECT_GT(fail3d, 0);
  EXPECT_GT(clean, 0);
  EXPECT_GT(excess, 0);
}

TEST(Extremes, OracleAndNullTrackers) {
  std::mt19937_64 rng(99);
  const SubsetRecord s = random_subset(rng, 2, 3);
  RunSet perfect, null;
  for (const VideoRecord* v : s.videos())
    for (int a : v->anchors) {
      perfect[v->key()].push_back(oracle_run(*v, a));
      AnchorRun n = oracle_run(*v, a);
      for (auto& p : n.predictions) p.bbox.reset();
      null[v->key()].push_back(n);
    }
  const MetricsReport p = score_runs(s, perfect, {}, "oracle");
  EXPECT_EQ(*p.subset.accuracy, 1.0);
  EXPECT_EQ(*p.subset.robustness2d, 1.0);
  EXPECT_EQ(*p.subset.robustness3d, 1.0);
  EXPECT_EQ(*p.subset.eao, 1.0);
  EXPECT_EQ(*p.subset.error2d_px, 0.0);
  EXPECT_EQ(*p.subset.error3d_mm, 0.0);
  const MetricsReport n = score_runs(s, null, {}, "null");
  EXPECT_EQ(*n.subset.robustness2d, 0.0);
  EXPECT_EQ(*n.subset.robustness3d, 0.0);
  EXPECT_EQ(*n.subset.eao, 0.0);
  EXPECT_FALSE(n.subset.accuracy);
}

TEST(StaticTracker, MatchesHandTrace) {
  // constant 0.25 mm/frame lateral motion at z = 250 mm: 0.5 px/frame
  const auto c = calib(500, 320, 240, 5);
  std::vector<FrameLabel> labels = moving_labels(80, c, 0.25);
  for (auto& l : labels)
    l.bbox = StereoBBox{BBox::from_centre(*l.keypoint_left, 12, 12), BBox::from_centre(*l.keypoint_right, 12, 12)};
  const VideoRecord v = video(labels, c);
  AnchorRun run;
  run.video = v.key();
  for (int f = 1; f < 80; ++f) run.predictions.push_back({f, v.labels[0].bbox});
  const AnchorScores a = score_anchor(run, v, {});

  // equal-size boxes shifted by s: IoU = (w - s) / (w + s); bad once s > 9w/11
  const double w = v.labels[0].bbox->left.width();
  int first_bad = -1;
  double acc = 0.0;
  int n = 0;
  for (int t = 1; t < 80; ++t) {
    const double shift = v.labels[t].bbox->left.centre().u - v.labels[0].bbox->left.centre().u;
    if (first_bad < 0 && shift > 9 * w / 11) first_bad = t;
    if (first_bad < 0) {
      acc += (w - shift) / (w + shift);
      ++n;
    }
  }
  ASSERT_GT(first_bad, 0);
  ASSERT_TRUE(a.r2d.failure_frame);
  EXPECT_EQ(*a.r2d.failure_frame, first_bad + 9);
  EXPECT_EQ(a.r2d.n, n);
  EXPECT_NEAR(*a.r2d.accuracy, acc / n, 1e-9);
  EXPECT_EQ(a.r2d.n_success, n);
  EXPECT_EQ(*a.r2d.robustness, static_cast<double>(n) / 79);
  // 3D: the static box keeps the anchor depth, lateral error grows 0.25 mm/frame
  EXPECT_FALSE(a.r3d.failure);
  EXPECT_NEAR(*a.r3d.error3d_mm, 0.25 * (1 + 79) / 2.0, 1e-6);

  SubsetRecord s;
  s.id = "static";
  s.cases.push_back({"case", {v}});
  const ref::AnchorScore want = ref::score_anchor(run, v, thresholds({}));
  EXPECT_EQ(a.r2d.accuracy, want.accuracy);
  EXPECT_EQ(a.r2d.failure_frame, want.fail2d_frame);
}

TEST(Aggregation, FrameWeightedAcrossAnchors) {
  const auto c = calib();
  const VideoRecord v = video(moving_labels(160, c, 0.1), c);
  RunSet runs;
  // anchor 0: perfect over 159 frames; anchor 100: right box halved overlap over 59 frames
  runs[v.key()].push_back(oracle_run(v, 0));
  AnchorRun half = oracle_run(v, 100);
  for (auto& p : half.predictions) p.bbox->left = shifted(p.bbox->left, p.bbox->left.width() / 3, 0);
  runs[v.key()].push_back(half);
  SubsetRecord s;
  s.cases.push_back({"case", {v}});
  const MetricsReport r = score_runs(s, runs, {}, "t");
  const auto& a0 = r.videos[0].anchors[0].r2d;
  const auto& a1 = r.videos[0].anchors[1].r2d;
  EXPECT_EQ(a0.n, 159);
  EXPECT_EQ(a1.n, 59);
  EXPECT_DOUBLE_EQ(*r.subset.accuracy, (*a0.accuracy * 159 + *a1.accuracy * 59) / 218);
  EXPECT_FALSE(r.window);  // one video: no window, no EAO
  EXPECT_FALSE(r.subset.eao);
}

TEST(Report, JsonCarriesConfigProvenance) {
  std::mt19937_64 rng(3);
  const SubsetRecord s = random_subset(rng, 1, 2);
  const MetricsReport r = score_runs(s, random_runs(rng, s), {}, "t");
  const nlohmann::json j = to_json(r);
  EXPECT_EQ(j["config"]["iou_fail_threshold"], 0.1);
  EXPECT_EQ(j["config"]["fail_streak"], 10);
  EXPECT_EQ(j["config"]["err3d_fail_mm"], 100.0);
  EXPECT_EQ(j["config"]["anchor_spacing"], 50);
  EXPECT_EQ(j["config"]["sphere_radius_mm"], 2.5);
  EXPECT_EQ(j["tracker"], "t");
  EXPECT_TRUE(j.contains("subset_sequence"));
}
