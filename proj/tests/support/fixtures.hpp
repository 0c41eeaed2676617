#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "sbench/dataset.hpp"
#include "sbench/geometry.hpp"

namespace fixtures {

using namespace sbench;

inline StereoCalibration calib(double f = 500.0, double cx = 320.0, double cy = 240.0, double b = 5.0) {
  StereoCalibration c;
  c.focal_px = f;
  c.cx_px = cx;
  c.cy_px = cy;
  c.baseline_mm = b;
  c.image_width = 640;
  c.image_height = 480;
  return c;
}

inline FrameLabel label_at(int index, const Point3D& p, const StereoCalibration& c, double radius = 2.5) {
  FrameLabel l;
  l.frame_index = index;
  l.keypoint_left = project(p, c, View::Left);
  l.keypoint_right = project(p, c, View::Right);
  l.bbox = sphere_to_bbox(p, radius, c);
  l.is_visible_in_both_stereo = true;
  return l;
}

inline FrameLabel invisible(int index) {
  FrameLabel l;
  l.frame_index = index;
  l.is_visible_in_both_stereo = false;
  return l;
}

/// Valid labels of a point moving `step` mm along x per frame at depth z.
inline std::vector<FrameLabel> moving_labels(int n, const StereoCalibration& c, double step = 0.0, double z = 250.0) {
  std::vector<FrameLabel> out;
  for (int i = 0; i < n; ++i) out.push_back(label_at(i, {step * i, 0.0, z}, c));
  return out;
}

inline VideoRecord video(std::vector<FrameLabel> labels, const StereoCalibration& c, std::string case_id = "case",
                         std::string id = "video") {
  VideoRecord v;
  v.case_id = std::move(case_id);
  v.id = std::move(id);
  v.calibration = c;
  v.frame_count = static_cast<int>(labels.size());
  v.labels = std::move(labels);
  return v;
}

/// Predictions equal to the ground truth, none on invisible frames.
inline AnchorRun oracle_run(const VideoRecord& v, int anchor) {
  AnchorRun r;
  r.video = v.key();
  r.anchor_frame = anchor;
  for (int f = anchor + 1; f < v.frame_count; ++f) {
    const auto& l = v.labels[static_cast<std::size_t>(f)];
    r.predictions.push_back({f, l.is_visible_in_both_stereo ? l.bbox : std::nullopt});
  }
  return r;
}

inline AnchorRun run_of(const VideoRecord& v, int anchor, const std::vector<std::optional<StereoBBox>>& boxes) {
  AnchorRun r;
  r.video = v.key();
  r.anchor_frame = anchor;
  for (std::size_t i = 0; i < boxes.size(); ++i) r.predictions.push_back({anchor + 1 + static_cast<int>(i), boxes[i]});
  return r;
}

inline BBox shifted(const BBox& b, double du, double dv) { return {b.u_min + du, b.v_min + dv, b.u_max + du, b.v_max + dv}; }

/// Random labelled video without images: visibility and difficulty come in
/// blocks, boxes are sphere projections of a wandering point.
inline VideoRecord random_video(std::mt19937_64& rng, const std::string& case_id, const std::string& id) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const StereoCalibration c = calib(300.0 + 200.0 * u(rng), 320.0, 240.0, 4.0 + 2.0 * u(rng));
  const int n = 30 + static_cast<int>(u(rng) * 90);
  std::vector<FrameLabel> labels;
  Point3D p{-10.0 + 20.0 * u(rng), -5.0 + 10.0 * u(rng), 60.0 + 60.0 * u(rng)};
  int state_left = 0;
  int state = 0;  // 0 valid, 1 invisible, 2 difficult
  for (int i = 0; i < n; ++i) {
    p.x_mm += 0.6 * (u(rng) - 0.5);
    p.y_mm += 0.6 * (u(rng) - 0.5);
    p.z_mm += 0.8 * (u(rng) - 0.5);
    if (state_left-- <= 0) {
      const double r = u(rng);
      state = r < 0.75 ? 0 : (r < 0.9 ? 1 : 2);
      state_left = 1 + static_cast<int>(u(rng) * (state == 0 ? 25 : 6));
    }
    if (i < 2) state = 0;
    FrameLabel l = label_at(i, p, c);
    if (state == 1) l = invisible(i);
    if (state == 2) l.is_difficult = true;
    labels.push_back(l);
  }
  return video(std::move(labels), c, case_id, id);
}

/// Random predictions mixing exact boxes, jitter, one-view misses, lost
/// target, collapsed disparity and excess boxes, in short regimes so that
/// failures both happen and do not.
inline AnchorRun random_run(std::mt19937_64& rng, const VideoRecord& v, int anchor) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AnchorRun r;
  r.video = v.key();
  r.anchor_frame = anchor;
  int mode = 0;
  int left = 0;
  StereoBBox last = *v.labels[static_cast<std::size_t>(anchor)].bbox;
  for (int f = anchor + 1; f < v.frame_count; ++f) {
    if (left-- <= 0) {
      mode = static_cast<int>(u(rng) * 7);
      left = 1 + static_cast<int>(u(rng) * 14);
    }
    const FrameLabel& l = v.labels[static_cast<std::size_t>(f)];
    std::optional<StereoBBox> box;
    const StereoBBox base = l.bbox ? *l.bbox : last;
    const double w = base.left.width();
    switch (mode) {
      case 0: box = base; break;
      case 1:
        box = StereoBBox{shifted(base.left, w * (u(rng) - 0.5), w * (u(rng) - 0.5)),
                         shifted(base.right, w * (u(rng) - 0.5), w * (u(rng) - 0.5))};
        break;
      case 2: box = StereoBBox{shifted(base.left, 3 * w, 0.0), base.right}; break;
      case 3: box = std::nullopt; break;
      case 4: box = StereoBBox{base.left, shifted(base.left, 1.0 * u(rng), 0.0)}; break;
      case 5: {
        // disparity shrunk: far-away 3D point, boxes still overlapping
        const double d = base.left.centre().u - base.right.centre().u;
        box = StereoBBox{base.left, shifted(base.right, d * (0.3 + 0.6 * u(rng)), 0.0)};
        break;
      }
      default: box = last; break;
    }
    if (box) last = *box;
    r.predictions.push_back({f, box});
  }
  return r;
}

inline SubsetRecord random_subset(std::mt19937_64& rng, int cases, int videos_per_case) {
  SubsetRecord s;
  s.id = "random";
  int k = 0;
  for (int c = 0; c < cases; ++c) {
    CaseRecord cr;
    cr.id = "case_" + std::to_string(c);
    for (int j = 0; j < videos_per_case; ++j) {
      VideoRecord v = random_video(rng, cr.id, "video_" + std::to_string(k++));
      // anchors every ~25 frames on valid frames, at least 10 frames before the end
      int next = 0;
      for (int f = 0; f + 10 < v.frame_count; ++f) {
        if (f >= next && v.labels[static_cast<std::size_t>(f)].is_valid()) {
          v.anchors.push_back(f);
          next = f + 25;
        }
      }
      if (v.anchors.empty()) v.anchors.push_back(0);
      cr.videos.push_back(std::move(v));
    }
    s.cases.push_back(std::move(cr));
  }
  return s;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("sbench_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace fixtures
