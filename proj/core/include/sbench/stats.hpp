#pragma once

#include <optional>

#include <nlohmann/json_fwd.hpp>

#include "sbench/dataset.hpp"

namespace sbench {

struct VideoStats {
  double avg_2d_velocity_px = 0.0;  // left keypoint, per frame
  double avg_3d_velocity_mm = 0.0;  // triangulated keypoint, per frame
  double pct_ignore = 0.0;
  std::optional<double> avg_ncc;    // needs the frame images
  int frame_count = 0;
  int valid_frames = 0;
  int anchors = 0;
};

struct StatsOptions {
  bool compute_ncc = true;
};

/// Velocities average the displacement over pairs of adjacent frames that
/// are both valid. avg_ncc averages, over anchors, the mean ZNCC between the
/// anchor patch and every later valid gt patch (both views, patches
/// bilinearly resampled to the anchor box size). Throws NoValidFrames.
VideoStats dataset_stats(const VideoRecord& video, const StatsOptions& options = {});

nlohmann::json to_json(const VideoStats& s);

}  // namespace sbench
