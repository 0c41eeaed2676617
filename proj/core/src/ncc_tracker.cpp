#include "sbench/ncc_tracker.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgproc.hpp>

#include "sbench/error.hpp"
#include "sbench/geometry.hpp"

namespace sbench {

namespace {

cv::Mat as_mat(const GrayImage& img) {
  // OpenCV only reads through this header; the data stays owned by `img`.
  return cv::Mat(img.height, img.width, CV_32F, const_cast<float*>(img.pixels.data()));
}

double parabola_offset(double left, double centre, double right) {
  const double denom = left - 2.0 * centre + right;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace

ViewTemplate make_template(const GrayImage& frame, const BBox& box) {
  ViewTemplate t;
  const Keypoint2D c = box.centre();
  const int cx = static_cast<int>(std::lround(c.u));
  const int cy = static_cast<int>(std::lround(c.v));
  t.half_width = std::max(1, static_cast<int>(std::lround(box.width() / 2.0)));
  t.half_height = std::max(1, static_cast<int>(std::lround(box.height() / 2.0)));
  t.offset = {c.u - cx, c.v - cy};
  if (cx - t.half_width < 0 || cy - t.half_height < 0 || cx + t.half_width >= frame.width ||
      cy + t.half_height >= frame.height)
    throw Error(ErrorCode::TemplateOutOfBounds, "anchor box does not fit inside the frame");
  t.patch = GrayImage(2 * t.half_width + 1, 2 * t.half_height + 1);
  for (int y = 0; y < t.patch.height; ++y)
    for (int x = 0; x < t.patch.width; ++x)
      t.patch.at(x, y) = frame.at(cx - t.half_width + x, cy - t.half_height + y);
  return t;
}

std::optional<NccMatch> match_template(const GrayImage& frame, const ViewTemplate& tmpl,
                                       const Keypoint2D& previous_centre, int search_radius_px) {
  // Integer centre of the template grid that corresponds to previous_centre.
  const int pcx = static_cast<int>(std::lround(previous_centre.u - tmpl.offset.u));
  const int pcy = static_cast<int>(std::lround(previous_centre.v - tmpl.offset.v));
  const int x0 = std::max(0, pcx - search_radius_px - tmpl.half_width);
  const int y0 = std::max(0, pcy - search_radius_px - tmpl.half_height);
  const int x1 = std::min(frame.width - 1, pcx + search_radius_px + tmpl.half_width);
  const int y1 = std::min(frame.height - 1, pcy + search_radius_px + tmpl.half_height);
  if (x1 - x0 + 1 < tmpl.patch.width || y1 - y0 + 1 < tmpl.patch.height) return std::nullopt;

  const cv::Mat region = as_mat(frame)(cv::Rect(x0, y0, x1 - x0 + 1, y1 - y0 + 1));
  cv::Mat response;
  cv::matchTemplate(region, as_mat(tmpl.patch), response, cv::TM_CCOEFF_NORMED);
  double peak = 0.0;
  cv::Point loc;
  cv::minMaxLoc(response, nullptr, &peak, nullptr, &loc);
  if (!std::isfinite(peak)) return std::nullopt;

  double dx = 0.0;
  double dy = 0.0;
  // An exact match needs no refinement.
  if (peak < 1.0 - 1e-6) {
    const auto r = [&](int x, int y) { return static_cast<double>(response.at<float>(y, x)); };
    if (loc.x > 0 && loc.x + 1 < response.cols) dx = parabola_offset(r(loc.x - 1, loc.y), peak, r(loc.x + 1, loc.y));
    if (loc.y > 0 && loc.y + 1 < response.rows) dy = parabola_offset(r(loc.x, loc.y - 1), peak, r(loc.x, loc.y + 1));
  }
  NccMatch m;
  m.centre = {x0 + loc.x + tmpl.half_width + dx + tmpl.offset.u, y0 + loc.y + tmpl.half_height + dy + tmpl.offset.v};
  m.score = std::min(peak, 1.0);
  return m;
}

void NccTracker::init(const FrameInput& frame, const StereoBBox& box) {
  init(load_gray(frame.left), load_gray(frame.right), box);
}

std::optional<StereoBBox> NccTracker::track(const FrameInput& frame) {
  return track(load_gray(frame.left), load_gray(frame.right));
}

void NccTracker::init(const GrayImage& left, const GrayImage& right, const StereoBBox& box) {
  left_ = make_template(left, box.left);
  right_ = make_template(right, box.right);
  anchor_box_ = box;
  anchor_disparity_ = disparity(box.left.centre(), box.right.centre());
  prev_left_ = box.left.centre();
  prev_right_ = box.right.centre();
}

std::optional<StereoBBox> NccTracker::track(const GrayImage& left, const GrayImage& right) {
  const auto ml = match_template(left, left_, prev_left_, options_.search_radius_px);
  const auto mr = match_template(right, right_, prev_right_, options_.search_radius_px);
  last_scores_ = {ml ? ml->score : 0.0, mr ? mr->score : 0.0};
  if (!ml || !mr || ml->score < options_.occlusion_threshold || mr->score < options_.occlusion_threshold)
    return std::nullopt;
  prev_left_ = ml->centre;
  prev_right_ = mr->centre;

  double scale = 1.0;
  const double d = disparity(ml->centre, mr->centre);
  if (anchor_disparity_ > 0.0 && d > 0.0) scale = std::clamp(d / anchor_disparity_, 0.25, 4.0);
  return StereoBBox{
      BBox::from_centre(ml->centre, anchor_box_.left.width() * scale, anchor_box_.left.height() * scale),
      BBox::from_centre(mr->centre, anchor_box_.right.width() * scale, anchor_box_.right.height() * scale)};
}

}  // namespace sbench
