#include "sbench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sbench/error.hpp"

namespace sbench {

namespace fs = std::filesystem;
using nlohmann::json;

void StereoCalibration::validate() const {
  const bool finite = std::isfinite(focal_px) && std::isfinite(cx_px) && std::isfinite(cy_px) &&
                      std::isfinite(baseline_mm);
  if (!finite || focal_px <= 0.0 || baseline_mm <= 0.0 || image_width <= 0 ||
      image_height <= 0) {
    throw Error(ErrorCode::InvalidCalibration,
                "calibration requires f > 0, baseline > 0 and a positive image size");
  }
  if (cx_px < 0.0 || cx_px >= image_width || cy_px < 0.0 || cy_px >= image_height) {
    throw Error(ErrorCode::InvalidCalibration, "principal point lies outside the image");
  }
}

fs::path VideoRecord::left_frame_path(int frame_index) const {
  return directory / "frames_left" / fmt::format("{:06d}.png", frame_index);
}

fs::path VideoRecord::right_frame_path(int frame_index) const {
  return directory / "frames_right" / fmt::format("{:06d}.png", frame_index);
}

std::size_t SubsetRecord::video_count() const {
  std::size_t n = 0;
  for (const auto& c : cases) n += c.videos.size();
  return n;
}

std::vector<const VideoRecord*> SubsetRecord::videos() const {
  std::vector<const VideoRecord*> out;
  out.reserve(video_count());
  for (const auto& c : cases)
    for (const auto& v : c.videos) out.push_back(&v);
  return out;
}

// ---------------------------------------------------------------------------
// file helpers

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& file, const std::string& contents) {
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  fs::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  fs::rename(tmp, file, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename onto " + file.string() + ": " + ec.message());
}

namespace {

json parse_json_file(const fs::path& file, ErrorCode on_parse_error) {
  const std::string text = read_file(file);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(on_parse_error, file.string() + ": " + e.what());
  }
}

double number_at(const json& j, std::size_t i, ErrorCode code) {
  if (!j.is_array() || i >= j.size() || !j[i].is_number())
    throw Error(code, "expected numeric array element");
  return j[i].get<double>();
}

std::optional<Keypoint2D> keypoint_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::MalformedLabel, "keypoint must be [u, v]");
  return Keypoint2D{number_at(j, 0, ErrorCode::MalformedLabel), number_at(j, 1, ErrorCode::MalformedLabel)};
}

json keypoint_to_json(const std::optional<Keypoint2D>& k) {
  if (!k) return nullptr;
  return json::array({k->u, k->v});
}

BBox bbox_from_json_as(const json& j, ErrorCode code) {
  if (!j.is_array() || j.size() != 4) throw Error(code, "bbox must be [u0, v0, u1, v1]");
  return {number_at(j, 0, code), number_at(j, 1, code), number_at(j, 2, code), number_at(j, 3, code)};
}

bool require_bool(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return false;
  if (!it->is_boolean()) throw Error(ErrorCode::MalformedLabel, std::string(key) + " must be a boolean");
  return it->get<bool>();
}

}  // namespace

// ---------------------------------------------------------------------------
// JSON conversions

json to_json(const BBox& box) { return json::array({box.u_min, box.v_min, box.u_max, box.v_max}); }

BBox bbox_from_json(const json& j) { return bbox_from_json_as(j, ErrorCode::SchemaMismatch); }

json to_json(const StereoCalibration& c) {
  return json{{"f", c.focal_px},          {"cx", c.cx_px},     {"cy", c.cy_px},
              {"baseline_mm", c.baseline_mm}, {"width", c.image_width}, {"height", c.image_height}};
}

StereoCalibration calibration_from_json(const json& j) {
  StereoCalibration c;
  try {
    c.focal_px = j.at("f").get<double>();
    c.cx_px = j.at("cx").get<double>();
    c.cy_px = j.at("cy").get<double>();
    c.baseline_mm = j.at("baseline_mm").get<double>();
    c.image_width = j.at("width").get<int>();
    c.image_height = j.at("height").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MissingCalibration, std::string("calibration: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const FrameLabel& l) {
  json j;
  j["frame"] = l.frame_index;
  j["kpt_left"] = keypoint_to_json(l.keypoint_left);
  j["kpt_right"] = keypoint_to_json(l.keypoint_right);
  j["bbox_left"] = l.bbox ? to_json(l.bbox->left) : json(nullptr);
  j["bbox_right"] = l.bbox ? to_json(l.bbox->right) : json(nullptr);
  j["is_difficult"] = l.is_difficult;
  j["is_visible_in_both_stereo"] = l.is_visible_in_both_stereo;
  return j;
}

FrameLabel label_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedLabel, "label entry must be an object");
  FrameLabel l;
  auto frame = j.find("frame");
  if (frame == j.end() || !frame->is_number_integer())
    throw Error(ErrorCode::MalformedLabel, "label entry needs an integer 'frame'");
  l.frame_index = frame->get<int>();
  l.keypoint_left = keypoint_from_json(j.value("kpt_left", json(nullptr)));
  l.keypoint_right = keypoint_from_json(j.value("kpt_right", json(nullptr)));
  const json bl = j.value("bbox_left", json(nullptr));
  const json br = j.value("bbox_right", json(nullptr));
  if (bl.is_null() != br.is_null())
    throw Error(ErrorCode::MalformedLabel,
                fmt::format("frame {}: bbox_left and bbox_right must both be present or null", l.frame_index));
  if (!bl.is_null())
    l.bbox = StereoBBox{bbox_from_json_as(bl, ErrorCode::MalformedLabel),
                        bbox_from_json_as(br, ErrorCode::MalformedLabel)};
  l.is_difficult = require_bool(j, "is_difficult");
  l.is_visible_in_both_stereo = j.contains("is_visible_in_both_stereo")
                                    ? require_bool(j, "is_visible_in_both_stereo")
                                    : true;
  return l;
}

json to_json(const AnchorRun& run) {
  json frames = json::array();
  for (const auto& p : run.predictions) {
    if (p.bbox) {
      frames.push_back({{"frame", p.frame_index},
                        {"outcome", "bbox"},
                        {"left", to_json(p.bbox->left)},
                        {"right", to_json(p.bbox->right)}});
    } else {
      frames.push_back({{"frame", p.frame_index}, {"outcome", "none"}});
    }
  }
  return {{"video", run.video}, {"anchor_frame", run.anchor_frame}, {"frames", std::move(frames)}};
}

AnchorRun anchor_run_from_json(const json& j) {
  AnchorRun run;
  try {
    run.video = j.at("video").get<std::string>();
    run.anchor_frame = j.at("anchor_frame").get<int>();
    const json& frames = j.at("frames");
    if (!frames.is_array()) throw Error(ErrorCode::SchemaMismatch, "'frames' must be an array");
    run.predictions.reserve(frames.size());
    for (const auto& f : frames) {
      FramePrediction p;
      p.frame_index = f.at("frame").get<int>();
      const std::string outcome = f.at("outcome").get<std::string>();
      if (outcome == "bbox") {
        p.bbox = StereoBBox{bbox_from_json(f.at("left")), bbox_from_json(f.at("right"))};
      } else if (outcome != "none") {
        throw Error(ErrorCode::SchemaMismatch, "unknown outcome tag '" + outcome + "'");
      }
      run.predictions.push_back(p);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("predictions: ") + e.what());
  }
  return run;
}

// ---------------------------------------------------------------------------
// files

StereoCalibration load_calibration(const fs::path& file) {
  if (!fs::exists(file)) throw Error(ErrorCode::MissingCalibration, "missing " + file.string());
  return calibration_from_json(parse_json_file(file, ErrorCode::MissingCalibration));
}

std::vector<FrameLabel> load_labels(const fs::path& file) {
  if (!fs::exists(file)) throw Error(ErrorCode::MalformedLabel, "missing " + file.string());
  const json j = parse_json_file(file, ErrorCode::MalformedLabel);
  if (!j.is_array()) throw Error(ErrorCode::MalformedLabel, file.string() + ": expected an array");
  std::vector<FrameLabel> labels;
  labels.reserve(j.size());
  for (const auto& entry : j) labels.push_back(label_from_json(entry));
  return labels;
}

std::vector<int> load_anchors(const fs::path& file) {
  if (!fs::exists(file)) throw Error(ErrorCode::InvalidAnchor, "missing " + file.string());
  const json j = parse_json_file(file, ErrorCode::InvalidAnchor);
  if (!j.is_array()) throw Error(ErrorCode::InvalidAnchor, file.string() + ": expected an array");
  std::vector<int> anchors;
  for (const auto& a : j) {
    if (!a.is_number_integer()) throw Error(ErrorCode::InvalidAnchor, "anchor indices must be integers");
    anchors.push_back(a.get<int>());
  }
  return anchors;
}

void save_calibration(const StereoCalibration& calib, const fs::path& file) {
  write_file_atomic(file, to_json(calib).dump(2) + "\n");
}

void save_labels(const std::vector<FrameLabel>& labels, const fs::path& file) {
  json j = json::array();
  for (const auto& l : labels) j.push_back(to_json(l));
  write_file_atomic(file, j.dump(1) + "\n");
}

void save_anchors(const std::vector<int>& anchors, const fs::path& file) {
  write_file_atomic(file, json(anchors).dump() + "\n");
}

void save_predictions(const AnchorRun& run, const fs::path& file) {
  write_file_atomic(file, to_json(run).dump() + "\n");
}

AnchorRun load_predictions(const fs::path& file) {
  return anchor_run_from_json(parse_json_file(file, ErrorCode::SchemaMismatch));
}

// ---------------------------------------------------------------------------
// validation

namespace {

bool in_image(const Keypoint2D& k, const StereoCalibration& c) {
  return std::isfinite(k.u) && std::isfinite(k.v) && k.u >= 0.0 && k.v >= 0.0 &&
         k.u < c.image_width && k.v < c.image_height;
}

void validate_label(const FrameLabel& l, const StereoCalibration& calib, double tol) {
  const int f = l.frame_index;
  if (l.is_valid() && (!l.keypoint_left || !l.keypoint_right || !l.bbox))
    throw Error(ErrorCode::MalformedLabel,
                fmt::format("frame {}: valid frame needs both keypoints and a bbox", f));
  for (const auto* k : {&l.keypoint_left, &l.keypoint_right}) {
    if (*k && !in_image(**k, calib))
      throw Error(ErrorCode::MalformedLabel, fmt::format("frame {}: keypoint outside the image", f));
  }
  if (l.keypoint_left.has_value() != l.keypoint_right.has_value())
    throw Error(ErrorCode::MalformedLabel, fmt::format("frame {}: keypoints must come in pairs", f));
  if (l.keypoint_left) {
    if (std::abs(l.keypoint_left->v - l.keypoint_right->v) > tol)
      throw Error(ErrorCode::EpipolarViolation,
                  fmt::format("frame {}: keypoint rows differ by {} px (tol {})", f,
                              std::abs(l.keypoint_left->v - l.keypoint_right->v), tol));
    if (l.keypoint_left->u - l.keypoint_right->u <= 0.0)
      throw Error(ErrorCode::NonPositiveDisparity, fmt::format("frame {}: keypoint disparity <= 0", f));
  }
  if (l.bbox) {
    if (!l.bbox->left.is_valid() || !l.bbox->right.is_valid())
      throw Error(ErrorCode::MalformedLabel, fmt::format("frame {}: degenerate bbox", f));
    const Keypoint2D cl = l.bbox->left.centre();
    const Keypoint2D cr = l.bbox->right.centre();
    if (std::abs(cl.v - cr.v) > tol)
      throw Error(ErrorCode::EpipolarViolation,
                  fmt::format("frame {}: bbox centre rows differ by {} px (tol {})", f,
                              std::abs(cl.v - cr.v), tol));
    if (cl.u - cr.u <= 0.0)
      throw Error(ErrorCode::NonPositiveDisparity, fmt::format("frame {}: bbox disparity <= 0", f));
  }
}

}  // namespace

void validate_video(const VideoRecord& video, const LoadOptions& options) {
  video.calibration.validate();
  if (video.labels.empty()) throw Error(ErrorCode::MalformedLabel, video.key() + ": no labels");
  if (video.frame_count != static_cast<int>(video.labels.size()))
    throw Error(ErrorCode::MalformedLabel, video.key() + ": frame count does not match labels");
  for (std::size_t i = 0; i < video.labels.size(); ++i) {
    const FrameLabel& l = video.labels[i];
    if (l.frame_index != static_cast<int>(i))
      throw Error(ErrorCode::MalformedLabel,
                  fmt::format("{}: label {} has frame index {}", video.key(), i, l.frame_index));
    validate_label(l, video.calibration, options.epipolar_tol_px);
  }
  for (std::size_t i = 0; i < video.anchors.size(); ++i) {
    const int a = video.anchors[i];
    if (i > 0 && a <= video.anchors[i - 1])
      throw Error(ErrorCode::NonIncreasingAnchors,
                  fmt::format("{}: anchors must be strictly increasing ({} after {})", video.key(), a,
                              video.anchors[i - 1]));
    if (a < 0 || a >= video.frame_count)
      throw Error(ErrorCode::InvalidAnchor, fmt::format("{}: anchor {} out of range", video.key(), a));
    if (!video.labels[a].is_valid())
      throw Error(ErrorCode::InvalidAnchor, fmt::format("{}: anchor {} is not a valid frame", video.key(), a));
  }
}

VideoRecord load_video(const fs::path& video_dir, const std::string& case_id, const LoadOptions& options) {
  VideoRecord v;
  v.case_id = case_id;
  v.id = video_dir.filename().string();
  v.directory = video_dir;
  const fs::path calib_file = video_dir / "calibration.json";
  v.calibration = load_calibration(calib_file);
  {
    const json raw = parse_json_file(calib_file, ErrorCode::MissingCalibration);
    if (auto it = raw.find("fps"); it != raw.end() && it->is_number()) v.frame_rate_hz = it->get<double>();
  }
  v.labels = load_labels(video_dir / "labels.json");
  v.frame_count = static_cast<int>(v.labels.size());
  v.anchors = load_anchors(video_dir / "anchors.json");
  validate_video(v, options);
  return v;
}

namespace {

std::vector<fs::path> sorted_subdirectories(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && entry.path().filename().string().front() != '.') out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

SubsetRecord load_dataset(const fs::path& root, const LoadOptions& options) {
  if (!fs::is_directory(root)) throw Error(ErrorCode::IoError, "dataset root not found: " + root.string());
  SubsetRecord subset;
  subset.id = fs::weakly_canonical(root).filename().string();
  for (const auto& case_dir : sorted_subdirectories(root)) {
    CaseRecord c;
    c.id = case_dir.filename().string();
    for (const auto& video_dir : sorted_subdirectories(case_dir)) {
      if (!fs::exists(video_dir / "labels.json") && !fs::exists(video_dir / "calibration.json")) continue;
      c.videos.push_back(load_video(video_dir, c.id, options));
    }
    if (c.videos.empty()) continue;
    subset.cases.push_back(std::move(c));
  }
  if (subset.cases.empty()) throw Error(ErrorCode::IoError, "no videos found under " + root.string());
  return subset;
}

}  // namespace sbench
