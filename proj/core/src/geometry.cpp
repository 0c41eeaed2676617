#include "sbench/geometry.hpp"

#include <cmath>
#include <utility>

#include "sbench/error.hpp"

namespace sbench {

double disparity(const Keypoint2D& left, const Keypoint2D& right) { return left.u - right.u; }

Point3D reproject(const Keypoint2D& left, double d, const StereoCalibration& calib) {
  if (!(d > 0.0)) throw Error(ErrorCode::NonPositiveDisparity, "cannot triangulate with disparity <= 0");
  const double b = calib.baseline_mm;
  return {(left.u - calib.cx_px) * b / d, (left.v - calib.cy_px) * b / d, calib.focal_px * b / d};
}

Point3D triangulate(const Keypoint2D& left, const Keypoint2D& right, const StereoCalibration& calib) {
  return reproject(left, disparity(left, right), calib);
}

Point3D triangulate(const StereoBBox& box, const StereoCalibration& calib) {
  return triangulate(box.left.centre(), box.right.centre(), calib);
}

Keypoint2D project(const Point3D& p, const StereoCalibration& calib, View view) {
  if (!(p.z_mm > 0.0)) throw Error(ErrorCode::BehindCamera, "point is not in front of the camera");
  const double x = view == View::Left ? p.x_mm : p.x_mm - calib.baseline_mm;
  return {calib.focal_px * x / p.z_mm + calib.cx_px, calib.focal_px * p.y_mm / p.z_mm + calib.cy_px};
}

namespace {

// Normalized-coordinate extents t of the planes {x = t z} (or {y = t z})
// through the origin that are tangent to a sphere with lateral offset `a`,
// depth `z` and radius `r`: (z^2 - r^2) t^2 - 2 a z t + (a^2 - r^2) = 0.
std::pair<double, double> tangent_extents(double a, double z, double r) {
  const double denom = z * z - r * r;
  const double root = r * std::sqrt(a * a + z * z - r * r);
  return {(a * z - root) / denom, (a * z + root) / denom};
}

BBox silhouette_box(double x, double y, double z, double r, const StereoCalibration& calib) {
  const auto [tu0, tu1] = tangent_extents(x, z, r);
  const auto [tv0, tv1] = tangent_extents(y, z, r);
  const double f = calib.focal_px;
  return {f * tu0 + calib.cx_px, f * tv0 + calib.cy_px, f * tu1 + calib.cx_px, f * tv1 + calib.cy_px};
}

}  // namespace

StereoBBox sphere_to_bbox(const Point3D& c, double radius_mm, const StereoCalibration& calib) {
  if (!(radius_mm > 0.0)) throw Error(ErrorCode::CameraInsideSphere, "sphere radius must be positive");
  const double r = radius_mm;
  const double bx = c.x_mm - calib.baseline_mm;
  const double norm_left = std::sqrt(c.x_mm * c.x_mm + c.y_mm * c.y_mm + c.z_mm * c.z_mm);
  const double norm_right = std::sqrt(bx * bx + c.y_mm * c.y_mm + c.z_mm * c.z_mm);
  if (!(c.z_mm > r) || !(norm_left > r) || !(norm_right > r))
    throw Error(ErrorCode::CameraInsideSphere, "camera centre inside or behind the virtual sphere");
  return {silhouette_box(c.x_mm, c.y_mm, c.z_mm, r, calib), silhouette_box(bx, c.y_mm, c.z_mm, r, calib)};
}

bool epipolar_consistent(const Keypoint2D& left, const Keypoint2D& right, double tol_px) {
  return std::abs(left.v - right.v) <= tol_px;
}

}  // namespace sbench
