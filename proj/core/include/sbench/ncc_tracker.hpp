#pragma once

#include <optional>

#include "sbench/image.hpp"
#include "sbench/tracker.hpp"

namespace sbench {

struct NccMatch {
  Keypoint2D centre;  // sub-pixel template centre in the frame
  double score = 0.0; // peak zero-normalized cross-correlation
};

/// Template of one view, cut at integer pixels around the rounded anchor
/// centre. `offset` is the anchor centre minus the template's integer centre.
struct ViewTemplate {
  GrayImage patch;
  int half_width = 0;
  int half_height = 0;
  Keypoint2D offset;
};

/// Throws TemplateOutOfBounds when the box does not fit inside the image.
ViewTemplate make_template(const GrayImage& frame, const BBox& box);

/// Exhaustive ZNCC search of `tmpl` over integer centres within
/// +/-`search_radius_px` of `previous_centre`, refined to sub-pixel precision
/// by a separable parabola fit around the peak. nullopt when the search
/// window cannot hold the template.
std::optional<NccMatch> match_template(const GrayImage& frame, const ViewTemplate& tmpl,
                                       const Keypoint2D& previous_centre, int search_radius_px);

struct NccTrackerOptions {
  int search_radius_px = 32;
  double occlusion_threshold = 0.4;
};

/// Template-matching baseline: both views track the anchor template
/// independently; box sizes follow the ratio of current to anchor disparity.
/// Reports "none" when either view's peak falls below the occlusion threshold.
class NccTracker final : public Tracker {
 public:
  explicit NccTracker(NccTrackerOptions options = {}) : options_(options) {}

  void init(const FrameInput& frame, const StereoBBox& box) override;
  std::optional<StereoBBox> track(const FrameInput& frame) override;

  void init(const GrayImage& left, const GrayImage& right, const StereoBBox& box);
  std::optional<StereoBBox> track(const GrayImage& left, const GrayImage& right);

  /// Peak scores of the most recent `track` call (left, right).
  std::pair<double, double> last_scores() const { return last_scores_; }

 private:
  NccTrackerOptions options_;
  ViewTemplate left_;
  ViewTemplate right_;
  StereoBBox anchor_box_;
  double anchor_disparity_ = 0.0;
  Keypoint2D prev_left_;
  Keypoint2D prev_right_;
  std::pair<double, double> last_scores_{0.0, 0.0};
};

}  // namespace sbench
