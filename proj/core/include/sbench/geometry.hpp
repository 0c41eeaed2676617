#pragma once

#include "sbench/types.hpp"

namespace sbench {

/// Default radius of the virtual sphere placed around a labelled keypoint.
inline constexpr double kDefaultSphereRadiusMm = 2.5;

/// u_left - u_right. May be zero or negative; callers decide.
double disparity(const Keypoint2D& left, const Keypoint2D& right);

/// Back-projects a left-view pixel with disparity `d` (pixels) into the left
/// camera frame: X = (u-cx)b/d, Y = (v-cy)b/d, Z = fb/d.
/// Throws NonPositiveDisparity when d <= 0.
Point3D reproject(const Keypoint2D& left, double d, const StereoCalibration& calib);

/// Triangulates the centres of a stereo box pair.
Point3D triangulate(const StereoBBox& box, const StereoCalibration& calib);
Point3D triangulate(const Keypoint2D& left, const Keypoint2D& right, const StereoCalibration& calib);

/// Pinhole projection into the left or right rectified view.
/// Throws BehindCamera when z <= 0.
Keypoint2D project(const Point3D& p, const StereoCalibration& calib, View view);

/// Tight axis-aligned boxes around the silhouette of a sphere in both views.
///
/// The silhouette is the conic cut by the tangent cone from each camera
/// centre. Its vertical tangent lines back-project to planes x = t*z through
/// the camera centre that touch the sphere, i.e. |c_x - t c_z| = r sqrt(1+t^2);
/// the two roots of the resulting quadratic are the box's u extents in
/// normalized coordinates, and likewise for v with c_y.
///
/// Throws CameraInsideSphere unless |c| > r and c.z > r (the silhouette is
/// then a bounded ellipse). Boxes are not clipped to the image.
StereoBBox sphere_to_bbox(const Point3D& centre, double radius_mm, const StereoCalibration& calib);

/// |v_left - v_right| <= tol.
bool epipolar_consistent(const Keypoint2D& left, const Keypoint2D& right, double tol_px);

}  // namespace sbench
