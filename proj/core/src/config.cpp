#include "sbench/config.hpp"

#include <nlohmann/json.hpp>

#include "sbench/dataset.hpp"
#include "sbench/error.hpp"

namespace sbench {

using nlohmann::json;

void EvalConfig::validate() const {
  if (!(iou_fail_threshold > 0.0) || !(err3d_fail_mm > 0.0) || !(sphere_radius_mm > 0.0) ||
      !(frame_timeout_s > 0.0) || !(ncc_occlusion_threshold > -1.0))
    throw Error(ErrorCode::InvalidConfig, "thresholds must be positive");
  if (fail_streak < 1) throw Error(ErrorCode::InvalidConfig, "fail_streak must be >= 1");
  if (anchor_spacing < 1) throw Error(ErrorCode::InvalidConfig, "anchor_spacing must be >= 1");
  if (ncc_search_radius_px < 1) throw Error(ErrorCode::InvalidConfig, "ncc_search_radius_px must be >= 1");
}

json to_json(const EvalConfig& c) {
  return json{
      {"iou_fail_threshold", c.iou_fail_threshold},
      {"fail_streak", c.fail_streak},
      {"err3d_fail_mm", c.err3d_fail_mm},
      {"anchor_spacing", c.anchor_spacing},
      {"stereo_iou_combine", c.stereo_iou_combine == StereoIouCombine::Mean ? "mean" : "min"},
      {"sphere_radius_mm", c.sphere_radius_mm},
      {"eao_literal_denominator", c.eao_literal_denominator},
      {"frame_timeout_s", c.frame_timeout_s},
      {"ncc_search_radius_px", c.ncc_search_radius_px},
      {"ncc_occlusion_threshold", c.ncc_occlusion_threshold},
  };
}

EvalConfig config_from_json(const json& j, EvalConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "iou_fail_threshold") c.iou_fail_threshold = value.get<double>();
      else if (key == "fail_streak") c.fail_streak = value.get<int>();
      else if (key == "err3d_fail_mm") c.err3d_fail_mm = value.get<double>();
      else if (key == "anchor_spacing") c.anchor_spacing = value.get<int>();
      else if (key == "stereo_iou_combine") {
        const auto mode = value.get<std::string>();
        if (mode == "mean") c.stereo_iou_combine = StereoIouCombine::Mean;
        else if (mode == "min") c.stereo_iou_combine = StereoIouCombine::Min;
        else throw Error(ErrorCode::InvalidConfig, "stereo_iou_combine must be 'mean' or 'min'");
      }
      else if (key == "sphere_radius_mm") c.sphere_radius_mm = value.get<double>();
      else if (key == "eao_literal_denominator") c.eao_literal_denominator = value.get<bool>();
      else if (key == "frame_timeout_s") c.frame_timeout_s = value.get<double>();
      else if (key == "ncc_search_radius_px") c.ncc_search_radius_px = value.get<int>();
      else if (key == "ncc_occlusion_threshold") c.ncc_occlusion_threshold = value.get<double>();
      else throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  c.validate();
  return c;
}

EvalConfig load_config(const std::filesystem::path& file, EvalConfig base) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, file.string() + ": " + e.what());
  }
  return config_from_json(j, base);
}

}  // namespace sbench
