#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sbench/types.hpp"

namespace sbench {

/// Ground truth for one frame of a video.
struct FrameLabel {
  int frame_index = 0;
  std::optional<Keypoint2D> keypoint_left;
  std::optional<Keypoint2D> keypoint_right;
  std::optional<StereoBBox> bbox;
  bool is_difficult = false;
  bool is_visible_in_both_stereo = true;

  /// Scored frames: visible in both views and not flagged difficult.
  bool is_valid() const { return is_visible_in_both_stereo && !is_difficult; }

  friend bool operator==(const FrameLabel&, const FrameLabel&) = default;
};

struct VideoRecord {
  std::string case_id;
  std::string id;
  int frame_count = 0;
  double frame_rate_hz = 25.0;
  std::filesystem::path directory;
  std::vector<FrameLabel> labels;
  std::vector<int> anchors;
  StereoCalibration calibration;

  std::filesystem::path left_frame_path(int frame_index) const;
  std::filesystem::path right_frame_path(int frame_index) const;
  /// "<case_id>/<id>", unique within a subset.
  std::string key() const { return case_id + "/" + id; }
};

struct CaseRecord {
  std::string id;
  std::vector<VideoRecord> videos;
};

struct SubsetRecord {
  std::string id;
  std::vector<CaseRecord> cases;

  std::size_t video_count() const;
  /// Videos in (case, video) lexicographic order.
  std::vector<const VideoRecord*> videos() const;
};

/// Tracker output for one frame; `std::nullopt` is the tracker reporting
/// that the target is not visible.
struct FramePrediction {
  int frame_index = 0;
  std::optional<StereoBBox> bbox;

  friend bool operator==(const FramePrediction&, const FramePrediction&) = default;
};

/// One tracker execution from an anchor frame to the end of the video.
/// `predictions` covers every frame in (anchor_frame, frame_count).
struct AnchorRun {
  std::string video;
  int anchor_frame = 0;
  std::vector<FramePrediction> predictions;

  friend bool operator==(const AnchorRun&, const AnchorRun&) = default;
};

struct LoadOptions {
  double epipolar_tol_px = 1.0;
};

inline constexpr double kDefaultEpipolarTolPx = 1.0;

/// Directory layout: root/<case_id>/<video_id>/{calibration.json,
/// labels.json, anchors.json, frames_left/%06d.png, frames_right/%06d.png}.
SubsetRecord load_dataset(const std::filesystem::path& root, const LoadOptions& options = {});

/// Loads and validates a single video directory.
VideoRecord load_video(const std::filesystem::path& video_dir, const std::string& case_id,
                       const LoadOptions& options = {});

/// Checks every FrameLabel / VideoRecord invariant; throws the matching Error.
void validate_video(const VideoRecord& video, const LoadOptions& options = {});

StereoCalibration load_calibration(const std::filesystem::path& file);
std::vector<FrameLabel> load_labels(const std::filesystem::path& file);
std::vector<int> load_anchors(const std::filesystem::path& file);

void save_calibration(const StereoCalibration& calib, const std::filesystem::path& file);
void save_labels(const std::vector<FrameLabel>& labels, const std::filesystem::path& file);
void save_anchors(const std::vector<int>& anchors, const std::filesystem::path& file);

void save_predictions(const AnchorRun& run, const std::filesystem::path& file);
AnchorRun load_predictions(const std::filesystem::path& file);

/// Writes `contents` to a sibling temporary file and renames it over `file`.
void write_file_atomic(const std::filesystem::path& file, const std::string& contents);
std::string read_file(const std::filesystem::path& file);

nlohmann::json to_json(const StereoCalibration& calib);
StereoCalibration calibration_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FrameLabel& label);
FrameLabel label_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AnchorRun& run);
AnchorRun anchor_run_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BBox& box);
BBox bbox_from_json(const nlohmann::json& j);

}  // namespace sbench
