#include "sbench/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sbench/error.hpp"
#include "sbench/geometry.hpp"
#include "sbench/harness.hpp"

namespace sbench {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// trajectory

Point3D Trajectory::at(double frame) const {
  if (kind == Kind::Sinusoidal) {
    const auto axis = [&](double c, double a, double period, double phase) {
      return c + a * std::sin(2.0 * std::numbers::pi * frame / period + phase);
    };
    return {axis(centre.x_mm, amplitude_mm.x_mm, period_frames.x_mm, phase_rad.x_mm),
            axis(centre.y_mm, amplitude_mm.y_mm, period_frames.y_mm, phase_rad.y_mm),
            axis(centre.z_mm, amplitude_mm.z_mm, period_frames.z_mm, phase_rad.z_mm)};
  }
  if (knots.empty()) return {};
  if (frame <= knots.front().first) return knots.front().second;
  if (frame >= knots.back().first) return knots.back().second;
  const auto hi = std::upper_bound(knots.begin(), knots.end(), frame,
                                   [](double f, const auto& k) { return f < k.first; });
  const auto lo = hi - 1;
  const double t = (frame - lo->first) / (hi->first - lo->first);
  const Point3D& a = lo->second;
  const Point3D& b = hi->second;
  return {a.x_mm + t * (b.x_mm - a.x_mm), a.y_mm + t * (b.y_mm - a.y_mm), a.z_mm + t * (b.z_mm - a.z_mm)};
}

Trajectory Trajectory::stationary(const Point3D& p) {
  Trajectory t;
  t.kind = Kind::PiecewiseLinear;
  t.knots = {{0.0, p}};
  return t;
}

Trajectory Trajectory::linear(const Point3D& start, const Point3D& v, int frame_count) {
  Trajectory t;
  t.kind = Kind::PiecewiseLinear;
  const double last = std::max(1, frame_count - 1);
  t.knots = {{0.0, start},
             {last, {start.x_mm + v.x_mm * last, start.y_mm + v.y_mm * last, start.z_mm + v.z_mm * last}}};
  return t;
}

void SceneSpec::validate() const {
  calib.validate();
  if (frame_count < 2) throw Error(ErrorCode::InvalidSceneSpec, "a scene needs at least two frames");
  if (!(sphere_radius_mm > 0.0)) throw Error(ErrorCode::InvalidSceneSpec, "sphere radius must be positive");
  if (anchor_spacing < 1) throw Error(ErrorCode::InvalidSceneSpec, "anchor spacing must be >= 1");
  if (texture.components < 1 || !(texture.min_wavelength_px > 0.0) ||
      texture.max_wavelength_px < texture.min_wavelength_px || !(texture.reference_depth_mm > 0.0))
    throw Error(ErrorCode::InvalidSceneSpec, "invalid texture parameters");
  if (trajectory.kind == Trajectory::Kind::PiecewiseLinear && trajectory.knots.empty())
    throw Error(ErrorCode::InvalidSceneSpec, "piecewise-linear trajectory needs knots");
  for (const auto& w : occlusion_windows) {
    if (w.start < 0 || w.end < w.start || w.end >= frame_count)
      throw Error(ErrorCode::InvalidSceneSpec, fmt::format("occlusion window [{}, {}] outside the video", w.start, w.end));
  }
  for (int f : difficult_frames) {
    if (f < 0 || f >= frame_count) throw Error(ErrorCode::InvalidSceneSpec, fmt::format("difficult frame {} outside the video", f));
  }
}

namespace {

bool occluded(const SceneSpec& spec, int frame) {
  return std::any_of(spec.occlusion_windows.begin(), spec.occlusion_windows.end(),
                     [&](const FrameRange& w) { return frame >= w.start && frame <= w.end; });
}

bool inside(const Keypoint2D& k, const StereoCalibration& c) {
  return k.u >= 0.0 && k.v >= 0.0 && k.u < c.image_width && k.v < c.image_height;
}

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

struct Wave {
  double kx;  // rad / mm
  double ky;
  double phase;
  double amplitude;
};

std::vector<Wave> texture_waves(const SceneSpec& spec) {
  std::mt19937_64 rng(spec.seed * 0x9E3779B97F4A7C15ULL + 0x5851F42D4C957F2DULL);
  const TextureSpec& t = spec.texture;
  const double mm_per_px = t.reference_depth_mm / spec.calib.focal_px;
  const double amplitude = t.contrast / (3.0 * std::sqrt(t.components / 2.0));
  std::vector<Wave> waves;
  waves.reserve(static_cast<std::size_t>(t.components));
  for (int i = 0; i < t.components; ++i) {
    // log-uniform wavelength keeps the spectrum spread across the band
    const double lambda_px = t.min_wavelength_px * std::pow(t.max_wavelength_px / t.min_wavelength_px, unit(rng));
    const double k = 2.0 * std::numbers::pi / (lambda_px * mm_per_px);
    const double dir = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    waves.push_back({k * std::cos(dir), k * std::sin(dir), uniform(rng, 0.0, 2.0 * std::numbers::pi), amplitude});
  }
  return waves;
}

void render_view(const SceneSpec& spec, const std::vector<Wave>& waves, const Point3D& target, View view,
                 GrayImage& out) {
  const StereoCalibration& c = spec.calib;
  const int w = c.image_width;
  const int h = c.image_height;
  const double a = target.z_mm / c.focal_px;  // mm per pixel on the textured plane
  const double x_off = (view == View::Left ? 0.0 : c.baseline_mm) - target.x_mm;
  std::vector<double> acc(static_cast<std::size_t>(w) * h, spec.texture.mean);
  std::vector<double> cu(w), su(w);
  for (const Wave& wave : waves) {
    // phase = kx * tx + ky * ty + phi with tx = (u - cx) a + x_off, ty = (v - cy) a - y_t
    const double alpha = wave.kx * a;
    const double beta = wave.ky * a;
    const double gamma = wave.phase + wave.kx * (x_off - c.cx_px * a) + wave.ky * (-target.y_mm - c.cy_px * a);
    for (int u = 0; u < w; ++u) {
      cu[u] = std::cos(alpha * u);
      su[u] = std::sin(alpha * u);
    }
    for (int v = 0; v < h; ++v) {
      const double cv = wave.amplitude * std::cos(beta * v + gamma);
      const double sv = wave.amplitude * std::sin(beta * v + gamma);
      double* row = acc.data() + static_cast<std::size_t>(v) * w;
      for (int u = 0; u < w; ++u) row[u] += cu[u] * cv - su[u] * sv;
    }
  }
  out = GrayImage(w, h);
  for (std::size_t i = 0; i < acc.size(); ++i) out.pixels[i] = static_cast<float>(std::clamp(acc[i], 0.0, 255.0));
}

void draw_occluder(const SceneSpec& spec, const Point3D& target, View view, GrayImage& img) {
  const double centre_u = project(target, spec.calib, view).u;
  const double half = spec.occluder_width_px / 2.0;
  for (int u = 0; u < img.width; ++u) {
    const double du = u - centre_u;
    if (std::abs(du) > half) continue;
    // shaded like a cylindrical instrument shaft; constant along v
    const float value = static_cast<float>(70.0 + 50.0 * std::cos(std::numbers::pi * du / (2.0 * half)));
    for (int v = 0; v < img.height; ++v) img.at(u, v) = value;
  }
}

}  // namespace

std::vector<FrameLabel> generate_labels(const SceneSpec& spec) {
  spec.validate();
  const StereoCalibration& c = spec.calib;
  std::vector<FrameLabel> labels;
  labels.reserve(static_cast<std::size_t>(spec.frame_count));
  for (int f = 0; f < spec.frame_count; ++f) {
    const Point3D p = spec.trajectory.at(f);
    if (!(p.z_mm > spec.sphere_radius_mm) || !(c.focal_px * c.baseline_mm / p.z_mm > 0.0))
      throw Error(ErrorCode::TrajectoryBehindCamera, fmt::format("frame {}: target not in front of both cameras", f));
    FrameLabel l;
    l.frame_index = f;
    l.is_difficult = std::find(spec.difficult_frames.begin(), spec.difficult_frames.end(), f) != spec.difficult_frames.end();
    const Keypoint2D kl = project(p, c, View::Left);
    const Keypoint2D kr = project(p, c, View::Right);
    if (occluded(spec, f) || !inside(kl, c) || !inside(kr, c)) {
      l.is_visible_in_both_stereo = false;
    } else {
      l.keypoint_left = kl;
      l.keypoint_right = kr;
      l.bbox = sphere_to_bbox(p, spec.sphere_radius_mm, c);
    }
    labels.push_back(l);
  }
  return labels;
}

std::pair<GrayImage, GrayImage> render_frame(const SceneSpec& spec, int frame) {
  const auto waves = texture_waves(spec);
  const Point3D p = spec.trajectory.at(frame);
  std::pair<GrayImage, GrayImage> views;
  render_view(spec, waves, p, View::Left, views.first);
  render_view(spec, waves, p, View::Right, views.second);
  if (occluded(spec, frame)) {
    draw_occluder(spec, p, View::Left, views.first);
    draw_occluder(spec, p, View::Right, views.second);
  }
  return views;
}

VideoRecord generate(const SceneSpec& spec, const fs::path& video_dir) {
  VideoRecord v;
  v.case_id = spec.case_id;
  v.id = spec.video_id;
  v.directory = video_dir;
  v.calibration = spec.calib;
  v.frame_rate_hz = spec.frame_rate_hz;
  v.labels = generate_labels(spec);
  v.frame_count = spec.frame_count;
  v.anchors = generate_anchors(v.labels, spec.anchor_spacing);

  fs::create_directories(video_dir / "frames_left");
  fs::create_directories(video_dir / "frames_right");
  nlohmann::json calib = to_json(spec.calib);
  calib["fps"] = spec.frame_rate_hz;
  write_file_atomic(video_dir / "calibration.json", calib.dump(2) + "\n");
  save_labels(v.labels, video_dir / "labels.json");
  save_anchors(v.anchors, video_dir / "anchors.json");

  const auto waves = texture_waves(spec);
  for (int f = 0; f < spec.frame_count; ++f) {
    const Point3D p = spec.trajectory.at(f);
    GrayImage left, right;
    render_view(spec, waves, p, View::Left, left);
    render_view(spec, waves, p, View::Right, right);
    if (occluded(spec, f)) {
      draw_occluder(spec, p, View::Left, left);
      draw_occluder(spec, p, View::Right, right);
    }
    save_gray_png(left, v.left_frame_path(f));
    save_gray_png(right, v.right_frame_path(f));
  }
  return v;
}

SceneSpec random_scene(std::uint64_t seed, int index, const SynthOptions& o) {
  std::mt19937_64 rng(seed * 0xD1B54A32D192ED03ULL + static_cast<std::uint64_t>(index) * 0x9E3779B97F4A7C15ULL + 1);
  SceneSpec s;
  s.case_id = fmt::format("case_{:03d}", index % std::max(1, o.cases));
  s.video_id = fmt::format("video_{:03d}", index);
  s.seed = rng();
  s.frame_count = o.frames;
  s.sphere_radius_mm = o.sphere_radius_mm;
  s.anchor_spacing = o.anchor_spacing;

  s.calib.image_width = o.width;
  s.calib.image_height = o.height;
  s.calib.focal_px = uniform(rng, 280.0, 340.0) * o.width / 256.0;
  s.calib.cx_px = (o.width - 1) / 2.0 + uniform(rng, -3.0, 3.0);
  s.calib.cy_px = (o.height - 1) / 2.0 + uniform(rng, -3.0, 3.0);
  s.calib.baseline_mm = uniform(rng, 4.0, 5.5);

  const double z0 = uniform(rng, 65.0, 95.0);
  s.texture.reference_depth_mm = z0;
  const double mm_per_px = z0 / s.calib.focal_px;
  // lateral excursions stay well inside the image
  const double max_px = 0.12 * std::min(o.width, o.height);
  const double x0 = uniform(rng, -0.08, 0.08) * o.width * mm_per_px;
  const double y0 = uniform(rng, -0.08, 0.08) * o.height * mm_per_px;

  const bool piecewise = o.motion == SynthMotion::Mixed && index % 2 == 1;
  if (piecewise) {
    s.trajectory.kind = Trajectory::Kind::PiecewiseLinear;
    const int knots = 4;
    for (int k = 0; k < knots; ++k) {
      const double frame = std::round(k * (o.frames - 1) / double(knots - 1));
      s.trajectory.knots.push_back({frame,
                                    {x0 + uniform(rng, -max_px, max_px) * mm_per_px,
                                     y0 + uniform(rng, -max_px, max_px) * mm_per_px,
                                     z0 + uniform(rng, -10.0, 10.0)}});
    }
  } else {
    s.trajectory.kind = Trajectory::Kind::Sinusoidal;
    s.trajectory.centre = {x0, y0, z0};
    s.trajectory.amplitude_mm = {uniform(rng, 0.4, 1.0) * max_px * mm_per_px,
                                 uniform(rng, 0.4, 1.0) * max_px * mm_per_px,
                                 o.motion == SynthMotion::Mixed ? uniform(rng, 4.0, 12.0) : 0.0};
    s.trajectory.period_frames = {uniform(rng, 100.0, 220.0), uniform(rng, 100.0, 220.0), uniform(rng, 120.0, 260.0)};
    s.trajectory.phase_rad = {uniform(rng, 0.0, 6.28), uniform(rng, 0.0, 6.28), uniform(rng, 0.0, 6.28)};
  }

  if (o.occlusions && o.frames >= 60) {
    const int windows = 1 + static_cast<int>(rng() % 2);
    for (int w = 0; w < windows; ++w) {
      const int len = 5 + static_cast<int>(rng() % 8);
      const int lo = 12 + w * (o.frames / 2);
      const int hi = std::min(o.frames - len - 1, lo + o.frames / 2 - len - 2);
      if (hi <= lo) continue;
      const int start = lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo));
      s.occlusion_windows.push_back({start, start + len - 1});
    }
    const int difficult = static_cast<int>(rng() % 4);
    for (int d = 0; d < difficult; ++d) s.difficult_frames.push_back(1 + static_cast<int>(rng() % (o.frames - 1)));
    std::sort(s.difficult_frames.begin(), s.difficult_frames.end());
    s.difficult_frames.erase(std::unique(s.difficult_frames.begin(), s.difficult_frames.end()), s.difficult_frames.end());
  }
  return s;
}

std::vector<SceneSpec> synth_dataset(const fs::path& root, std::uint64_t seed, const SynthOptions& options) {
  if (options.videos < 1 || options.cases < 1)
    throw Error(ErrorCode::InvalidSceneSpec, "need at least one video and one case");
  std::vector<SceneSpec> scenes;
  for (int i = 0; i < options.videos; ++i) {
    SceneSpec s = random_scene(seed, i, options);
    generate(s, root / s.case_id / s.video_id);
    scenes.push_back(std::move(s));
  }
  return scenes;
}

}  // namespace sbench
