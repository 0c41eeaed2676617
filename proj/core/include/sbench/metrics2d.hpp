#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sbench/config.hpp"
#include "sbench/dataset.hpp"
#include "sbench/failure.hpp"
#include "sbench/types.hpp"

namespace sbench {

/// Intersection over union of two axis-aligned boxes. Degenerate boxes
/// overlap nothing.
double iou(const BBox& a, const BBox& b);

struct StereoIou {
  double left = 0.0;
  double right = 0.0;
  double combined = 0.0;

  friend bool operator==(const StereoIou&, const StereoIou&) = default;
};

StereoIou frame_iou(const StereoBBox& pred, const StereoBBox& gt,
                    StereoIouCombine combine = StereoIouCombine::Mean);

enum class FrameStatus {
  Valid,                // gt valid, prediction present
  Ignore,               // gt not valid and no excess prediction
  NoPredictionVisible,  // gt valid, tracker said "none"
  ExcessPrediction,     // tracker predicted while the target is not visible
};

struct FrameOutcome2D {
  int frame_index = 0;
  FrameStatus status = FrameStatus::Ignore;
  std::optional<StereoIou> iou;
  /// Mean of the left and right bbox-centre distances.
  std::optional<double> centre_error_px;
};

/// Throws SchemaMismatch unless `run` holds exactly one prediction for each
/// frame in (anchor_frame, labels.size()), in order.
void check_run_coverage(const AnchorRun& run, std::span<const FrameLabel> labels);

/// Pairs each prediction of `run` with its label. Throws SchemaMismatch when
/// the run does not cover exactly the frames after its anchor.
std::vector<FrameOutcome2D> frame_outcomes_2d(const AnchorRun& run, std::span<const FrameLabel> labels,
                                              StereoIouCombine combine = StereoIouCombine::Mean);

/// A frame is bad when its gt is valid and either the tracker gave no box or
/// the worse of the two views overlaps less than `iou_threshold`.
std::optional<FailureEvent> detect_failure_2d(std::span<const FrameOutcome2D> outcomes,
                                              double iou_threshold = 0.1, int streak = 10);

struct AnchorResult2D {
  std::optional<double> accuracy;     // undefined when n == 0
  std::optional<double> error2d_px;   // undefined when n == 0
  std::optional<double> robustness;   // undefined when the denominator is 0
  std::optional<FailureEvent> failure;
  std::optional<int> failure_frame;   // frame index of the trigger
  int n = 0;                          // frames behind accuracy and error
  int n_success = 0;
  int n_valid = 0;
  int n_excess = 0;

  int robustness_denominator() const { return n_valid + n_excess; }
};

AnchorResult2D score_anchor_2d(std::span<const FrameOutcome2D> outcomes, const EvalConfig& config = {});

/// Convenience: outcomes + scoring in one call.
AnchorResult2D evaluate_anchor_2d(const AnchorRun& run, std::span<const FrameLabel> labels,
                                  const EvalConfig& config = {});

}  // namespace sbench
