#include "sbench/metrics2d.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "sbench/error.hpp"

namespace sbench {

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.u_max, b.u_max) - std::max(a.u_min, b.u_min);
  const double ih = std::min(a.v_max, b.v_max) - std::max(a.v_min, b.v_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

StereoIou frame_iou(const StereoBBox& pred, const StereoBBox& gt, StereoIouCombine combine) {
  StereoIou out;
  out.left = iou(pred.left, gt.left);
  out.right = iou(pred.right, gt.right);
  out.combined = combine == StereoIouCombine::Mean ? (out.left + out.right) / 2.0 : std::min(out.left, out.right);
  return out;
}

void check_run_coverage(const AnchorRun& run, std::span<const FrameLabel> labels) {
  const auto n_labels = static_cast<int>(labels.size());
  if (run.anchor_frame < 0 || run.anchor_frame >= n_labels)
    throw Error(ErrorCode::SchemaMismatch, fmt::format("anchor {} outside video", run.anchor_frame));
  const auto expected = static_cast<std::size_t>(n_labels - run.anchor_frame - 1);
  if (run.predictions.size() != expected)
    throw Error(ErrorCode::SchemaMismatch,
                fmt::format("run from anchor {} has {} predictions, expected {}", run.anchor_frame,
                            run.predictions.size(), expected));
  for (std::size_t i = 0; i < run.predictions.size(); ++i) {
    if (run.predictions[i].frame_index != run.anchor_frame + 1 + static_cast<int>(i))
      throw Error(ErrorCode::SchemaMismatch, "prediction frame indices must be contiguous after the anchor");
  }
}

std::vector<FrameOutcome2D> frame_outcomes_2d(const AnchorRun& run, std::span<const FrameLabel> labels,
                                              StereoIouCombine combine) {
  check_run_coverage(run, labels);
  std::vector<FrameOutcome2D> out;
  out.reserve(run.predictions.size());
  for (const auto& p : run.predictions) {
    const FrameLabel& gt = labels[static_cast<std::size_t>(p.frame_index)];
    FrameOutcome2D o;
    o.frame_index = p.frame_index;
    if (!gt.is_valid()) {
      o.status = (p.bbox && !gt.is_visible_in_both_stereo) ? FrameStatus::ExcessPrediction : FrameStatus::Ignore;
    } else if (!p.bbox) {
      o.status = FrameStatus::NoPredictionVisible;
    } else {
      o.status = FrameStatus::Valid;
      o.iou = frame_iou(*p.bbox, *gt.bbox, combine);
      o.centre_error_px = (distance(p.bbox->left.centre(), gt.bbox->left.centre()) +
                           distance(p.bbox->right.centre(), gt.bbox->right.centre())) /
                          2.0;
    }
    out.push_back(o);
  }
  return out;
}

namespace {

bool is_ignored(const FrameOutcome2D& o) {
  return o.status == FrameStatus::Ignore || o.status == FrameStatus::ExcessPrediction;
}

bool is_bad(const FrameOutcome2D& o, double threshold) {
  if (o.status == FrameStatus::NoPredictionVisible) return true;
  return std::min(o.iou->left, o.iou->right) < threshold;
}

}  // namespace

std::optional<FailureEvent> detect_failure_2d(std::span<const FrameOutcome2D> outcomes, double iou_threshold,
                                              int streak) {
  return detect_streak(
      outcomes.size(), streak, [&](std::size_t i) { return is_ignored(outcomes[i]); },
      [&](std::size_t i) { return is_bad(outcomes[i], iou_threshold); });
}

AnchorResult2D score_anchor_2d(std::span<const FrameOutcome2D> outcomes, const EvalConfig& config) {
  AnchorResult2D r;
  r.failure = detect_failure_2d(outcomes, config.iou_fail_threshold, config.fail_streak);
  if (r.failure) r.failure_frame = outcomes[r.failure->trigger].frame_index;
  const std::size_t window_end = r.failure ? r.failure->streak_start : outcomes.size();
  const std::size_t tracked_end = r.failure ? r.failure->trigger + 1 : outcomes.size();

  double iou_sum = 0.0;
  double err_sum = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const FrameOutcome2D& o = outcomes[i];
    if (o.status == FrameStatus::ExcessPrediction) ++r.n_excess;
    if (o.status == FrameStatus::Valid || o.status == FrameStatus::NoPredictionVisible) ++r.n_valid;
    if (o.status != FrameStatus::Valid) continue;
    if (i < window_end) {
      iou_sum += o.iou->combined;
      err_sum += *o.centre_error_px;
      ++r.n;
    }
    if (i < tracked_end && o.iou->left > config.iou_fail_threshold && o.iou->right > config.iou_fail_threshold)
      ++r.n_success;
  }
  if (r.n > 0) {
    r.accuracy = iou_sum / r.n;
    r.error2d_px = err_sum / r.n;
  }
  if (r.robustness_denominator() > 0)
    r.robustness = static_cast<double>(r.n_success) / r.robustness_denominator();
  return r;
}

AnchorResult2D evaluate_anchor_2d(const AnchorRun& run, std::span<const FrameLabel> labels,
                                  const EvalConfig& config) {
  const auto outcomes = frame_outcomes_2d(run, labels, config.stereo_iou_combine);
  return score_anchor_2d(outcomes, config);
}

}  // namespace sbench
