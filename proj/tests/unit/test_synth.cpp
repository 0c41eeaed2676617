#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "../support/fixtures.hpp"
#include "sbench/error.hpp"
#include "sbench/geometry.hpp"
#include "sbench/stats.hpp"
#include "sbench/synth.hpp"

using namespace sbench;
using namespace fixtures;
namespace fs = std::filesystem;

namespace {

SceneSpec small_scene(int frames = 30) {
  SynthOptions o;
  o.frames = frames;
  o.width = 128;
  o.height = 96;
  return random_scene(5, 1, o);
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::IoError;
}

SceneSpec plain_scene(const Trajectory& t, int frames) {
  SceneSpec s;
  s.calib = calib(500, 320, 240, 5);
  s.frame_count = frames;
  s.trajectory = t;
  s.texture.reference_depth_mm = 250;
  return s;
}

}  // namespace

TEST(Synth, SameSeedSameFiles) {
  TempDir a("synth"), b("synth");
  SynthOptions o;
  o.videos = 2;
  o.frames = 20;
  o.width = 96;
  o.height = 64;
  synth_dataset(a.path, 7, o);
  synth_dataset(b.path, 7, o);
  const auto ta = tree(a.path), tb = tree(b.path);
  EXPECT_EQ(ta.size(), 2u * (3 + 2 * 20));
  EXPECT_TRUE(ta == tb);
  TempDir c("synth");
  synth_dataset(c.path, 8, o);
  EXPECT_FALSE(ta == tree(c.path));
}

TEST(Synth, LabelsPassValidationWithExactEpipolarRows) {
  TempDir tmp("synth");
  const SceneSpec s = small_scene(80);
  const VideoRecord v = generate(s, tmp.path / s.case_id / s.video_id);
  EXPECT_NO_THROW(validate_video(v, {1e-9}));
  const VideoRecord loaded = load_video(tmp.path / s.case_id / s.video_id, s.case_id, {1e-9});
  EXPECT_EQ(loaded.labels, v.labels);
  EXPECT_EQ(loaded.anchors, v.anchors);
  for (const auto& l : v.labels) {
    if (!l.keypoint_left) continue;
    EXPECT_EQ(l.keypoint_left->v, l.keypoint_right->v);
  }
}

TEST(Synth, KeypointsReprojectToTrajectory) {
  const SceneSpec s = small_scene(150);
  const auto labels = generate_labels(s);
  int checked = 0;
  for (const auto& l : labels) {
    if (!l.keypoint_left) continue;
    const Point3D p = triangulate(*l.keypoint_left, *l.keypoint_right, s.calib);
    const Point3D want = s.trajectory.at(l.frame_index);
    EXPECT_LT(distance(p, want), 1e-6);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Synth, BoxesAreSphereProjections) {
  const SceneSpec s = small_scene(40);
  for (const auto& l : generate_labels(s)) {
    if (!l.bbox) continue;
    EXPECT_EQ(*l.bbox, sphere_to_bbox(s.trajectory.at(l.frame_index), s.sphere_radius_mm, s.calib));
  }
}

TEST(Synth, OcclusionAndDifficultFlags) {
  SceneSpec s = plain_scene(Trajectory::stationary({0, 0, 250}), 40);
  s.occlusion_windows = {{5, 9}};
  s.difficult_frames = {20};
  const auto labels = generate_labels(s);
  for (int f = 5; f <= 9; ++f) EXPECT_FALSE(labels[f].is_visible_in_both_stereo);
  EXPECT_TRUE(labels[4].is_valid());
  EXPECT_TRUE(labels[20].is_difficult);
  EXPECT_TRUE(labels[20].is_visible_in_both_stereo);
}

TEST(Synth, OccluderIsDrawn) {
  SceneSpec s = plain_scene(Trajectory::stationary({0, 0, 250}), 10);
  s.calib.image_width = 320;
  s.calib.image_height = 240;
  s.calib.cx_px = 160;
  s.calib.cy_px = 120;
  s.occlusion_windows = {{3, 3}};
  const auto [l2, r2] = render_frame(s, 2);
  const auto [l3, r3] = render_frame(s, 3);
  EXPECT_FALSE(l2 == l3);
  EXPECT_GT(zncc(resample(l2, {150, 110, 170, 130}, 20, 20), resample(render_frame(s, 1).first, {150, 110, 170, 130}, 20, 20)), 0.999);
}

TEST(Synth, TrajectoryBehindCamera) {
  const SceneSpec s = plain_scene(Trajectory::linear({0, 0, 50}, {0, 0, -2}, 40), 40);
  EXPECT_EQ(code_of([&] { generate_labels(s); }), ErrorCode::TrajectoryBehindCamera);
}

TEST(Synth, InvalidSpec) {
  SceneSpec s = plain_scene(Trajectory::stationary({0, 0, 250}), 40);
  s.occlusion_windows = {{35, 45}};
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::InvalidSceneSpec);
}

TEST(Synth, TranslationMotionKeepsDepth) {
  SynthOptions o;
  o.motion = SynthMotion::Translation;
  for (int i = 0; i < 4; ++i) {
    const SceneSpec s = random_scene(3, i, o);
    EXPECT_EQ(s.trajectory.at(0).z_mm, s.trajectory.at(77).z_mm);
  }
}
