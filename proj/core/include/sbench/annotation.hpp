#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbench/dataset.hpp"
#include "sbench/error.hpp"

namespace sbench {

struct AnnotationOptions {
  double sphere_radius_mm = 2.5;
  /// Reject right clicks off the left click's row instead of snapping them.
  bool strict_epipolar = false;
  double epipolar_tol_px = 1.0;
  int anchor_spacing = 50;
  double drift_threshold_px = 5.0;
  /// Frontend assets served at "/" when set.
  std::filesystem::path static_dir;
};

struct KeypointResult {
  Keypoint2D keypoint_left;
  Keypoint2D keypoint_right;  // after epipolar snapping
  double disparity_px = 0.0;
  Point3D point;
  StereoBBox bbox;
  long revision = 0;
};

struct DriftEntry {
  int frame = 0;
  double displacement_px = 0.0;
};

struct Session {
  std::string id;
  std::string video;  // "<case>/<video>"
  std::string annotator;
  bool review_mode = false;
  int cursor = 0;
};

/// Label editing over a dataset directory. Every accepted write is
/// validated against the dataset invariants and persisted atomically before
/// returning; nothing is cached between calls. Writes to one video are
/// serialized and guarded by a per-video revision counter.
class AnnotationStore {
 public:
  AnnotationStore(std::filesystem::path root, AnnotationOptions options = {});

  const AnnotationOptions& options() const { return options_; }
  const std::filesystem::path& root() const { return root_; }

  nlohmann::json list_videos() const;
  /// Label, revision and image URLs for one frame. Throws OutOfRange.
  nlohmann::json get_frame(const std::string& video, int index);
  std::filesystem::path frame_image(const std::string& video, int index, View view);

  /// Snaps the right click onto the left row (or rejects it when strict),
  /// triangulates, derives the boxes from the virtual sphere and persists.
  /// Identical repeated requests are no-ops. Throws OutOfRange,
  /// NonPositiveDisparity, EpipolarViolation, ConcurrentEdit.
  KeypointResult put_keypoints(const std::string& video, int index, Keypoint2D left, Keypoint2D right,
                               std::optional<long> revision, const std::string& annotator);

  /// Throws MalformedLabel when the frame would become valid without keypoints.
  long put_flags(const std::string& video, int index, bool is_difficult, bool is_visible_in_both_stereo,
                 std::optional<long> revision, const std::string& annotator);

  /// Frames whose left keypoint moved more than `threshold_px` since the
  /// previous frame.
  std::vector<DriftEntry> review_diff(const std::string& video, std::optional<double> threshold_px);

  long sign_off(const std::string& video, const std::string& reviewer, bool approved, std::optional<long> revision);

  Session open_session(const std::string& video, const std::string& annotator, bool review_mode);
  Session step(const std::string& session_id, int delta);
  Session session(const std::string& session_id);

 private:
  struct VideoState {
    StereoCalibration calibration;
    std::vector<FrameLabel> labels;
    std::vector<int> unlabelled;
    nlohmann::json meta;  // revision, reviews
    long revision() const { return meta.value("revision", 0L); }
  };

  std::filesystem::path video_dir(const std::string& video) const;
  std::mutex& video_mutex(const std::string& video);
  VideoState load_state(const std::string& video) const;
  void persist(const std::string& video, VideoState& state);
  static void check_revision(const VideoState& state, std::optional<long> revision);
  static void check_index(const VideoState& state, int index);

  std::map<std::string, Session> load_sessions() const;
  void save_sessions(const std::map<std::string, Session>& sessions) const;

  std::filesystem::path root_;
  AnnotationOptions options_;
  std::mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> video_mutexes_;
  std::mutex session_mutex_;
};

/// HTTP JSON front of an AnnotationStore.
///
///   GET  /api/videos
///   GET  /api/videos/<case>/<video>/frames/<i>
///   GET  /api/videos/<case>/<video>/frames/<i>/{left,right}.png
///   PUT  /api/videos/<case>/<video>/frames/<i>/keypoints  {kpt_left, kpt_right, revision?, annotator?}
///   PUT  /api/videos/<case>/<video>/frames/<i>/flags      {is_difficult, is_visible_in_both_stereo, revision?}
///   GET  /api/videos/<case>/<video>/review-diff[?threshold=px]
///   PUT  /api/videos/<case>/<video>/review               {reviewer, approved, revision?}
///   POST /api/sessions                                    {video, annotator, review_mode}
///   GET  /api/sessions/<id>
///   POST /api/sessions/<id>/step                          {delta}
class AnnotationServer {
 public:
  explicit AnnotationServer(AnnotationStore& store);
  ~AnnotationServer();

  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  /// Blocks until stop().
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it; call listen_after_bind() next.
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP status for a library error raised while serving a request.
int http_status(ErrorCode code);

}  // namespace sbench
