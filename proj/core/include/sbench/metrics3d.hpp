#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sbench/config.hpp"
#include "sbench/dataset.hpp"
#include "sbench/failure.hpp"

namespace sbench {

enum class FrameStatus3D {
  Valid,                 // triangulated; error_mm present
  Ignore,
  NonPositiveDisparity,  // predicted disparity <= 0, cannot triangulate
  NoPrediction,          // gt valid, tracker said "none"
  ExcessPrediction,
};

struct FrameOutcome3D {
  int frame_index = 0;
  FrameStatus3D status = FrameStatus3D::Ignore;
  std::optional<double> disparity_px;  // of the predicted box pair
  std::optional<double> error_mm;
};

std::vector<FrameOutcome3D> frame_outcomes_3d(const AnchorRun& run, std::span<const FrameLabel> labels,
                                              const StereoCalibration& calib);

/// Bad frames: error above `error_threshold_mm`, disparity <= 0, or no box
/// on a valid frame. The conditions may mix within one streak.
std::optional<FailureEvent> detect_failure_3d(std::span<const FrameOutcome3D> outcomes,
                                              double error_threshold_mm = 100.0, int streak = 10);

struct AnchorResult3D {
  std::optional<double> error3d_mm;
  std::optional<double> robustness;
  std::optional<FailureEvent> failure;
  std::optional<int> failure_frame;
  int n = 0;
  int n_success = 0;
  int n_valid = 0;
  int n_excess = 0;

  int robustness_denominator() const { return n_valid + n_excess; }
};

AnchorResult3D score_anchor_3d(std::span<const FrameOutcome3D> outcomes, const EvalConfig& config = {});

AnchorResult3D evaluate_anchor_3d(const AnchorRun& run, std::span<const FrameLabel> labels,
                                  const StereoCalibration& calib, const EvalConfig& config = {});

}  // namespace sbench
