#include "sbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include <nlohmann/json.hpp>

#include "sbench/error.hpp"
#include "sbench/geometry.hpp"
#include "sbench/image.hpp"

namespace sbench {

namespace {

Keypoint2D left_point(const FrameLabel& l) { return l.keypoint_left ? *l.keypoint_left : l.bbox->left.centre(); }
Keypoint2D right_point(const FrameLabel& l) { return l.keypoint_right ? *l.keypoint_right : l.bbox->right.centre(); }

std::optional<double> average_ncc(const VideoRecord& video) {
  if (video.anchors.empty()) return std::nullopt;
  for (int a : video.anchors) {
    if (!std::filesystem::exists(video.left_frame_path(a)) || !std::filesystem::exists(video.right_frame_path(a)))
      return std::nullopt;
  }
  std::map<int, std::pair<GrayImage, GrayImage>> cache;
  const auto frames = [&](int f) -> const std::pair<GrayImage, GrayImage>& {
    auto it = cache.find(f);
    if (it == cache.end())
      it = cache.emplace(f, std::make_pair(load_gray(video.left_frame_path(f)), load_gray(video.right_frame_path(f)))).first;
    return it->second;
  };

  double total = 0.0;
  int anchors_used = 0;
  for (int a : video.anchors) {
    const StereoBBox& box = *video.labels[static_cast<std::size_t>(a)].bbox;
    const int wl = std::max(2, static_cast<int>(std::lround(box.left.width())));
    const int hl = std::max(2, static_cast<int>(std::lround(box.left.height())));
    const int wr = std::max(2, static_cast<int>(std::lround(box.right.width())));
    const int hr = std::max(2, static_cast<int>(std::lround(box.right.height())));
    const GrayImage tl = resample(frames(a).first, box.left, wl, hl);
    const GrayImage tr = resample(frames(a).second, box.right, wr, hr);
    double sum = 0.0;
    int n = 0;
    for (int f = a + 1; f < video.frame_count; ++f) {
      const FrameLabel& l = video.labels[static_cast<std::size_t>(f)];
      if (!l.is_valid()) continue;
      const auto& [left, right] = frames(f);
      sum += (zncc(tl, resample(left, l.bbox->left, wl, hl)) + zncc(tr, resample(right, l.bbox->right, wr, hr))) / 2.0;
      ++n;
    }
    if (n == 0) continue;
    total += sum / n;
    ++anchors_used;
  }
  if (anchors_used == 0) return std::nullopt;
  return total / anchors_used;
}

}  // namespace

VideoStats dataset_stats(const VideoRecord& video, const StatsOptions& options) {
  VideoStats s;
  s.frame_count = video.frame_count;
  s.anchors = static_cast<int>(video.anchors.size());
  for (const auto& l : video.labels) s.valid_frames += l.is_valid() ? 1 : 0;
  if (s.valid_frames == 0) throw Error(ErrorCode::NoValidFrames, video.key() + ": no valid frames");
  s.pct_ignore = 100.0 * (s.frame_count - s.valid_frames) / s.frame_count;

  double v2 = 0.0;
  double v3 = 0.0;
  int pairs = 0;
  for (int f = 1; f < video.frame_count; ++f) {
    const FrameLabel& a = video.labels[static_cast<std::size_t>(f - 1)];
    const FrameLabel& b = video.labels[static_cast<std::size_t>(f)];
    if (!a.is_valid() || !b.is_valid()) continue;
    v2 += distance(left_point(a), left_point(b));
    v3 += distance(triangulate(left_point(a), right_point(a), video.calibration),
                   triangulate(left_point(b), right_point(b), video.calibration));
    ++pairs;
  }
  if (pairs > 0) {
    s.avg_2d_velocity_px = v2 / pairs;
    s.avg_3d_velocity_mm = v3 / pairs;
  }
  if (options.compute_ncc) s.avg_ncc = average_ncc(video);
  return s;
}

nlohmann::json to_json(const VideoStats& s) {
  return {{"avg_2d_velocity_px", s.avg_2d_velocity_px},
          {"avg_3d_velocity_mm", s.avg_3d_velocity_mm},
          {"pct_ignore", s.pct_ignore},
          {"avg_ncc", s.avg_ncc ? nlohmann::json(*s.avg_ncc) : nlohmann::json(nullptr)},
          {"frames", s.frame_count},
          {"valid_frames", s.valid_frames},
          {"anchors", s.anchors}};
}

}  // namespace sbench
