#pragma once

#include <cmath>

namespace sbench {

/// Pixel position in a rectified view; u runs along the epipolar line.
struct Keypoint2D {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const Keypoint2D&, const Keypoint2D&) = default;
};

inline double distance(const Keypoint2D& a, const Keypoint2D& b) {
  return std::hypot(a.u - b.u, a.v - b.v);
}

/// Axis-aligned box in pixel coordinates, corners inclusive of the
/// continuous extent [u_min, u_max] x [v_min, v_max].
struct BBox {
  double u_min = 0.0;
  double v_min = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;

  double width() const { return u_max - u_min; }
  double height() const { return v_max - v_min; }
  double area() const { return width() * height(); }
  Keypoint2D centre() const { return {(u_min + u_max) / 2.0, (v_min + v_max) / 2.0}; }
  bool is_valid() const {
    return std::isfinite(u_min) && std::isfinite(v_min) && std::isfinite(u_max) &&
           std::isfinite(v_max) && u_min < u_max && v_min < v_max;
  }

  static BBox from_centre(const Keypoint2D& c, double width, double height) {
    return {c.u - width / 2.0, c.v - height / 2.0, c.u + width / 2.0, c.v + height / 2.0};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct StereoBBox {
  BBox left;
  BBox right;

  friend bool operator==(const StereoBBox&, const StereoBBox&) = default;
};

/// Rectified pinhole pair sharing one focal length and principal point.
/// The right camera sits `baseline_mm` along +x of the left camera.
struct StereoCalibration {
  double focal_px = 0.0;
  double cx_px = 0.0;
  double cy_px = 0.0;
  double baseline_mm = 0.0;
  int image_width = 0;
  int image_height = 0;

  /// Throws Error(InvalidCalibration) when an invariant does not hold.
  void validate() const;

  friend bool operator==(const StereoCalibration&, const StereoCalibration&) = default;
};

/// Camera-centred coordinates of the left rectified camera, millimetres.
struct Point3D {
  double x_mm = 0.0;
  double y_mm = 0.0;
  double z_mm = 0.0;

  friend bool operator==(const Point3D&, const Point3D&) = default;
};

inline double distance(const Point3D& a, const Point3D& b) {
  const double dx = a.x_mm - b.x_mm;
  const double dy = a.y_mm - b.y_mm;
  const double dz = a.z_mm - b.z_mm;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

enum class View { Left, Right };

}  // namespace sbench
