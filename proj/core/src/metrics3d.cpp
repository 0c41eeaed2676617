#include "sbench/metrics3d.hpp"

#include "sbench/geometry.hpp"
#include "sbench/metrics2d.hpp"

namespace sbench {

std::vector<FrameOutcome3D> frame_outcomes_3d(const AnchorRun& run, std::span<const FrameLabel> labels,
                                              const StereoCalibration& calib) {
  check_run_coverage(run, labels);
  std::vector<FrameOutcome3D> out;
  out.reserve(run.predictions.size());
  for (const auto& p : run.predictions) {
    const FrameLabel& gt = labels[static_cast<std::size_t>(p.frame_index)];
    FrameOutcome3D o;
    o.frame_index = p.frame_index;
    if (p.bbox) o.disparity_px = disparity(p.bbox->left.centre(), p.bbox->right.centre());
    if (!gt.is_valid()) {
      o.status = (p.bbox && !gt.is_visible_in_both_stereo) ? FrameStatus3D::ExcessPrediction : FrameStatus3D::Ignore;
    } else if (!p.bbox) {
      o.status = FrameStatus3D::NoPrediction;
    } else if (!(*o.disparity_px > 0.0)) {
      o.status = FrameStatus3D::NonPositiveDisparity;
    } else {
      o.status = FrameStatus3D::Valid;
      o.error_mm = distance(reproject(p.bbox->left.centre(), *o.disparity_px, calib), triangulate(*gt.bbox, calib));
    }
    out.push_back(o);
  }
  return out;
}

namespace {

bool is_ignored(const FrameOutcome3D& o) {
  return o.status == FrameStatus3D::Ignore || o.status == FrameStatus3D::ExcessPrediction;
}

bool is_bad(const FrameOutcome3D& o, double threshold_mm) {
  if (o.status != FrameStatus3D::Valid) return true;
  return *o.error_mm > threshold_mm;
}

}  // namespace

std::optional<FailureEvent> detect_failure_3d(std::span<const FrameOutcome3D> outcomes, double error_threshold_mm,
                                              int streak) {
  return detect_streak(
      outcomes.size(), streak, [&](std::size_t i) { return is_ignored(outcomes[i]); },
      [&](std::size_t i) { return is_bad(outcomes[i], error_threshold_mm); });
}

AnchorResult3D score_anchor_3d(std::span<const FrameOutcome3D> outcomes, const EvalConfig& config) {
  AnchorResult3D r;
  r.failure = detect_failure_3d(outcomes, config.err3d_fail_mm, config.fail_streak);
  if (r.failure) r.failure_frame = outcomes[r.failure->trigger].frame_index;
  const std::size_t window_end = r.failure ? r.failure->streak_start : outcomes.size();
  const std::size_t tracked_end = r.failure ? r.failure->trigger + 1 : outcomes.size();

  double err_sum = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const FrameOutcome3D& o = outcomes[i];
    switch (o.status) {
      case FrameStatus3D::ExcessPrediction: ++r.n_excess; continue;
      case FrameStatus3D::Ignore: continue;
      default: ++r.n_valid;
    }
    if (o.status != FrameStatus3D::Valid) continue;
    if (i < window_end) {
      err_sum += *o.error_mm;
      ++r.n;
    }
    if (i < tracked_end && *o.error_mm <= config.err3d_fail_mm) ++r.n_success;
  }
  if (r.n > 0) r.error3d_mm = err_sum / r.n;
  if (r.robustness_denominator() > 0)
    r.robustness = static_cast<double>(r.n_success) / r.robustness_denominator();
  return r;
}

AnchorResult3D evaluate_anchor_3d(const AnchorRun& run, std::span<const FrameLabel> labels,
                                  const StereoCalibration& calib, const EvalConfig& config) {
  const auto outcomes = frame_outcomes_3d(run, labels, calib);
  return score_anchor_3d(outcomes, config);
}

}  // namespace sbench
