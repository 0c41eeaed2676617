#include <cmath>

#include <gtest/gtest.h>

#include "../support/fixtures.hpp"
#include "sbench/error.hpp"
#include "sbench/harness.hpp"
#include "sbench/metrics2d.hpp"
#include "sbench/ncc_tracker.hpp"
#include "sbench/synth.hpp"

using namespace sbench;
using namespace fixtures;

namespace {

// Smooth random texture evaluated at (x - ox, y - oy).
GrayImage texture(int w, int h, double ox, double oy, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Wave {
    double kx, ky, phase, amp;
  };
  std::vector<Wave> waves;
  for (int i = 0; i < 30; ++i) {
    const double len = 6 + 20 * u(rng), ang = 6.283 * u(rng);
    waves.push_back({6.283 / len * std::cos(ang), 6.283 / len * std::sin(ang), 6.283 * u(rng), 1 + u(rng)});
  }
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0;
      for (const auto& wv : waves) s += wv.amp * std::sin(wv.kx * (x - ox) + wv.ky * (y - oy) + wv.phase);
      img.at(x, y) = static_cast<float>(128 + 6 * s);
    }
  return img;
}

StereoBBox box_at(double u, double v, double d, double side) {
  return {BBox::from_centre({u, v}, side, side), BBox::from_centre({u - d, v}, side, side)};
}

GrayImage noise(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 255.0f);
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = u(rng);
  return img;
}

}  // namespace

TEST(Ncc, IdenticalFrameReturnsAnchorBox) {
  const GrayImage l = texture(200, 150, 0, 0), r = texture(200, 150, -12, 0);
  NccTracker t;
  const StereoBBox anchor = box_at(100, 70, 12, 21);
  t.init(l, r, anchor);
  const auto p = t.track(l, r);
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->left.u_min, anchor.left.u_min, 1e-9);
  EXPECT_NEAR(p->left.v_max, anchor.left.v_max, 1e-9);
  EXPECT_NEAR(p->right.u_min, anchor.right.u_min, 1e-9);
  EXPECT_NEAR(p->right.v_min, anchor.right.v_min, 1e-9);
  EXPECT_NEAR(t.last_scores().first, 1.0, 1e-6);
  EXPECT_NEAR(t.last_scores().second, 1.0, 1e-6);
}

TEST(Ncc, FollowsIntegerTranslation) {
  NccTracker t;
  t.init(texture(200, 150, 0, 0), texture(200, 150, -12, 0), box_at(100, 70, 12, 21));
  for (int k = 1; k <= 10; ++k) {
    const auto p = t.track(texture(200, 150, 2 * k, -k), texture(200, 150, 2 * k - 12, -k));
    ASSERT_TRUE(p);
    EXPECT_NEAR(p->left.centre().u, 100 + 2 * k, 0.05);
    EXPECT_NEAR(p->left.centre().v, 70 - k, 0.05);
    EXPECT_NEAR(p->right.centre().u, 88 + 2 * k, 0.05);
  }
}

TEST(Ncc, BoxScalesWithDisparity) {
  NccTracker t;
  const StereoBBox anchor = box_at(100, 70, 10, 20);
  t.init(texture(220, 150, 0, 0), texture(220, 150, -10, 0), anchor);
  // the right view drifts until the disparity has doubled
  std::optional<StereoBBox> p;
  for (int d = 11; d <= 20; ++d) p = t.track(texture(220, 150, 0, 0), texture(220, 150, -d, 0));
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->left.width(), 2 * anchor.left.width(), 1e-6);
  EXPECT_NEAR(p->right.height(), 2 * anchor.right.height(), 1e-6);
}

TEST(Ncc, LowCorrelationReportsNone) {
  NccTracker t;
  t.init(texture(200, 150, 0, 0), texture(200, 150, -12, 0), box_at(100, 70, 12, 21));
  GrayImage flat(200, 150, 128.0f);
  EXPECT_FALSE(t.track(noise(200, 150, 3), noise(200, 150, 4)));
  EXPECT_FALSE(t.track(flat, flat));
}

TEST(Ncc, TemplateOutOfBounds) {
  NccTracker t;
  try {
    t.init(texture(100, 80, 0, 0), texture(100, 80, 0, 0), box_at(5, 40, 2, 20));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TemplateOutOfBounds);
  }
}

TEST(Ncc, TranslationSequenceWithinOnePixel) {
  TempDir tmp("ncc");
  SynthOptions o;
  o.motion = SynthMotion::Translation;
  o.occlusions = false;
  o.frames = 100;
  const SceneSpec s = random_scene(21, 0, o);
  const VideoRecord v = generate(s, tmp.path / s.case_id / s.video_id);
  auto tracker = make_tracker(TrackerHandle::parse("builtin:ncc"), v, {});
  int total = 0, close = 0;
  for (int anchor : v.anchors) {
    const AnchorRun run = run_anchor(*tracker, v, anchor, nullptr);
    for (const auto& p : run.predictions) {
      const auto& gt = v.labels[static_cast<std::size_t>(p.frame_index)];
      if (!gt.is_valid()) continue;
      ++total;
      if (p.bbox && distance(p.bbox->left.centre(), gt.bbox->left.centre()) <= 1.0 &&
          distance(p.bbox->right.centre(), gt.bbox->right.centre()) <= 1.0)
        ++close;
    }
  }
  EXPECT_GT(total, 100);
  EXPECT_GE(close, 0.95 * total) << close << "/" << total;
}
