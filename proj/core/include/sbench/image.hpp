#pragma once

#include <filesystem>
#include <vector>

#include "sbench/types.hpp"

namespace sbench {

/// Single-channel float image; pixel (x, y) is centred on the continuous
/// coordinate (u, v) = (x, y).
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, float fill = 0.0f) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  bool empty() const { return pixels.empty(); }
  float at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

  /// Bilinear sample with edge clamping.
  double sample(double u, double v) const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Reads any format OpenCV decodes, converted to grayscale in [0, 255].
GrayImage load_gray(const std::filesystem::path& file);

/// Writes an 8-bit grayscale PNG (values rounded and clamped to [0, 255]).
void save_gray_png(const GrayImage& image, const std::filesystem::path& file);

/// Bilinear resampling of `box` onto a width x height grid of cell centres.
GrayImage resample(const GrayImage& image, const BBox& box, int width, int height);

/// Zero-normalized cross-correlation of two equally sized images, in [-1, 1].
/// Returns 0 when either image has no variance.
double zncc(const GrayImage& a, const GrayImage& b);

}  // namespace sbench
