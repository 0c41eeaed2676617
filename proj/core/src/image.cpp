#include "sbench/image.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgcodecs.hpp>

#include "sbench/error.hpp"

namespace sbench {

double GrayImage::sample(double u, double v) const {
  u = std::clamp(u, 0.0, static_cast<double>(width - 1));
  v = std::clamp(v, 0.0, static_cast<double>(height - 1));
  const int x0 = static_cast<int>(std::floor(u));
  const int y0 = static_cast<int>(std::floor(v));
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  const double top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
  const double bottom = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

GrayImage load_gray(const std::filesystem::path& file) {
  const cv::Mat m = cv::imread(file.string(), cv::IMREAD_GRAYSCALE);
  if (m.empty()) throw Error(ErrorCode::IoError, "cannot decode image " + file.string());
  GrayImage img(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<unsigned char>(y);
    for (int x = 0; x < m.cols; ++x) img.at(x, y) = row[x];
  }
  return img;
}

void save_gray_png(const GrayImage& image, const std::filesystem::path& file) {
  cv::Mat m(image.height, image.width, CV_8UC1);
  for (int y = 0; y < image.height; ++y) {
    auto* row = m.ptr<unsigned char>(y);
    for (int x = 0; x < image.width; ++x)
      row[x] = static_cast<unsigned char>(std::clamp(std::lround(image.at(x, y)), 0L, 255L));
  }
  std::error_code ec;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
  // Fixed compression settings keep the encoded bytes reproducible.
  if (!cv::imwrite(file.string(), m, {cv::IMWRITE_PNG_COMPRESSION, 3}))
    throw Error(ErrorCode::IoError, "cannot write " + file.string());
}

GrayImage resample(const GrayImage& image, const BBox& box, int width, int height) {
  GrayImage out(width, height);
  const double sx = box.width() / width;
  const double sy = box.height() / height;
  for (int y = 0; y < height; ++y) {
    const double v = box.v_min + (y + 0.5) * sy;
    for (int x = 0; x < width; ++x) {
      const double u = box.u_min + (x + 0.5) * sx;
      out.at(x, y) = static_cast<float>(image.sample(u, v));
    }
  }
  return out;
}

double zncc(const GrayImage& a, const GrayImage& b) {
  if (a.width != b.width || a.height != b.height || a.empty()) return 0.0;
  const double n = static_cast<double>(a.pixels.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    ma += a.pixels[i];
    mb += b.pixels[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double da = a.pixels[i] - ma;
    const double db = b.pixels[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace sbench
