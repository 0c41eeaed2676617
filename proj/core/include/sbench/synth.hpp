#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sbench/dataset.hpp"
#include "sbench/image.hpp"

namespace sbench {

/// Parametric path of the target point in left-camera coordinates.
struct Trajectory {
  enum class Kind { PiecewiseLinear, Sinusoidal };

  Kind kind = Kind::PiecewiseLinear;
  /// PiecewiseLinear: (frame, position) knots sorted by frame; held
  /// constant outside the knot range.
  std::vector<std::pair<double, Point3D>> knots;
  /// Sinusoidal: centre + amplitude * sin(2 pi frame / period + phase), per axis.
  Point3D centre;
  Point3D amplitude_mm;
  Point3D period_frames{1.0, 1.0, 1.0};
  Point3D phase_rad;

  Point3D at(double frame) const;

  static Trajectory stationary(const Point3D& p);
  static Trajectory linear(const Point3D& start, const Point3D& velocity_mm_per_frame, int frame_count);
};

/// Band-limited procedural texture: a sum of plane waves whose wavelengths,
/// measured in pixels at `reference_depth_mm`, lie in [min, max].
struct TextureSpec {
  int components = 40;
  double min_wavelength_px = 5.0;
  double max_wavelength_px = 28.0;
  double reference_depth_mm = 80.0;
  double mean = 128.0;
  double contrast = 95.0;  // peak deviation of the summed waves
};

struct FrameRange {
  int start = 0;
  int end = 0;  // inclusive
};

struct SceneSpec {
  std::string case_id = "case_000";
  std::string video_id = "video_000";
  std::uint64_t seed = 0;
  int frame_count = 150;
  double frame_rate_hz = 25.0;
  StereoCalibration calib;
  Trajectory trajectory;
  TextureSpec texture;
  std::vector<FrameRange> occlusion_windows;
  std::vector<int> difficult_frames;
  double sphere_radius_mm = 2.5;
  int anchor_spacing = 50;
  /// Width of the occluding bar drawn over the target, in pixels.
  int occluder_width_px = 150;

  /// Throws InvalidSceneSpec (or InvalidCalibration).
  void validate() const;
};

/// Ground-truth labels only (no rendering). Occluded frames and frames whose
/// keypoint leaves either image are marked not visible and carry no geometry.
/// Throws TrajectoryBehindCamera if the target ever has z <= radius or a
/// non-positive disparity.
std::vector<FrameLabel> generate_labels(const SceneSpec& spec);

/// Renders both views of one frame.
std::pair<GrayImage, GrayImage> render_frame(const SceneSpec& spec, int frame);

/// Writes calibration.json, labels.json, anchors.json and both frame
/// directories under `video_dir`; returns the loaded-equivalent record.
VideoRecord generate(const SceneSpec& spec, const std::filesystem::path& video_dir);

enum class SynthMotion { Translation, Mixed };

struct SynthOptions {
  int videos = 4;
  int cases = 2;
  int frames = 150;
  int width = 256;
  int height = 256;
  SynthMotion motion = SynthMotion::Mixed;
  bool occlusions = true;
  int anchor_spacing = 50;
  double sphere_radius_mm = 2.5;
};

/// Deterministic random scene for video `index` of a dataset seeded with `seed`.
SceneSpec random_scene(std::uint64_t seed, int index, const SynthOptions& options);

/// Generates root/<case>/<video>/... for `options.videos` random scenes.
std::vector<SceneSpec> synth_dataset(const std::filesystem::path& root, std::uint64_t seed,
                                     const SynthOptions& options);

}  // namespace sbench
