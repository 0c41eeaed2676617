#pragma once

#include <filesystem>

#include <nlohmann/json_fwd.hpp>

namespace sbench {

enum class StereoIouCombine { Mean, Min };

/// Evaluation thresholds. Defaults are the benchmark's published constants.
struct EvalConfig {
  double iou_fail_threshold = 0.1;
  int fail_streak = 10;
  double err3d_fail_mm = 100.0;
  int anchor_spacing = 50;
  StereoIouCombine stereo_iou_combine = StereoIouCombine::Mean;
  double sphere_radius_mm = 2.5;
  bool eao_literal_denominator = false;
  double frame_timeout_s = 30.0;

  // builtin NCC baseline
  int ncc_search_radius_px = 32;
  double ncc_occlusion_threshold = 0.4;

  /// Throws InvalidConfig when a threshold is non-positive or streak < 1.
  void validate() const;

  friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

nlohmann::json to_json(const EvalConfig& config);

/// Flat-key JSON; unknown keys are rejected, missing keys keep `base` values.
EvalConfig config_from_json(const nlohmann::json& j, EvalConfig base = {});
EvalConfig load_config(const std::filesystem::path& file, EvalConfig base = {});

}  // namespace sbench
