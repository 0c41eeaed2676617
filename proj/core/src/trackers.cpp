#include <chrono>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sbench/error.hpp"
#include "sbench/ncc_tracker.hpp"
#include "sbench/subprocess.hpp"
#include "sbench/tracker.hpp"

namespace sbench {

using nlohmann::json;

TrackerHandle TrackerHandle::parse(std::string_view spec) {
  constexpr std::string_view builtin = "builtin:";
  constexpr std::string_view exec = "exec:";
  TrackerHandle h;
  if (spec.substr(0, builtin.size()) == builtin) {
    h.kind = Kind::Builtin;
    h.target = std::string(spec.substr(builtin.size()));
  } else if (spec.substr(0, exec.size()) == exec) {
    h.kind = Kind::External;
    h.target = std::string(spec.substr(exec.size()));
    h.deterministic = false;
  } else {
    throw Error(ErrorCode::UnknownTracker, fmt::format("tracker '{}' must start with builtin: or exec:", spec));
  }
  if (h.target.empty()) throw Error(ErrorCode::UnknownTracker, "empty tracker target");
  return h;
}

std::string TrackerHandle::label() const {
  return (kind == Kind::Builtin ? "builtin:" : "exec:") + target;
}

namespace {

class OracleTracker final : public Tracker {
 public:
  explicit OracleTracker(const VideoRecord& video) : labels_(video.labels) {}
  void init(const FrameInput&, const StereoBBox&) override {}
  std::optional<StereoBBox> track(const FrameInput& frame) override {
    if (frame.index < 0 || frame.index >= static_cast<int>(labels_.size())) return std::nullopt;
    const FrameLabel& l = labels_[static_cast<std::size_t>(frame.index)];
    if (!l.is_visible_in_both_stereo || !l.bbox) return std::nullopt;
    return l.bbox;
  }

 private:
  std::vector<FrameLabel> labels_;
};

class NullTracker final : public Tracker {
 public:
  void init(const FrameInput&, const StereoBBox&) override {}
  std::optional<StereoBBox> track(const FrameInput&) override { return std::nullopt; }
};

class StaticTracker final : public Tracker {
 public:
  void init(const FrameInput&, const StereoBBox& box) override { box_ = box; }
  std::optional<StereoBBox> track(const FrameInput&) override { return box_; }

 private:
  StereoBBox box_;
};

json box_json(const BBox& b) { return json::array({b.u_min, b.v_min, b.u_max, b.v_max}); }

BBox box_arg(const json& j) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::ProtocolViolation, "bbox must be [u_min, v_min, u_max, v_max]");
  for (const auto& v : j)
    if (!v.is_number()) throw Error(ErrorCode::ProtocolViolation, "bbox entries must be numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

// Line-delimited JSON over the child's stdin/stdout.
class ExternalTracker final : public Tracker {
 public:
  ExternalTracker(std::string command, double timeout_s)
      : command_(std::move(command)),
        timeout_(std::chrono::milliseconds(static_cast<long>(timeout_s * 1000.0))) {}

  void init(const FrameInput& frame, const StereoBBox& box) override {
    if (!process_ || !process_->running()) process_ = std::make_unique<LineProcess>(command_);
    send({{"type", "init"},
          {"frame", frame.index},
          {"left_frame", frame.left.string()},
          {"right_frame", frame.right.string()},
          {"bbox_left", box_json(box.left)},
          {"bbox_right", box_json(box.right)}});
    const json reply = receive();
    if (reply.value("type", "") != "ready") throw Error(ErrorCode::ProtocolViolation, "expected {\"type\":\"ready\"}");
  }

  std::optional<StereoBBox> track(const FrameInput& frame) override {
    if (!process_) throw Error(ErrorCode::TrackerCrashed, "tracker not initialised");
    send({{"type", "frame"},
          {"frame", frame.index},
          {"left_frame", frame.left.string()},
          {"right_frame", frame.right.string()}});
    const json reply = receive();
    const std::string type = reply.value("type", "");
    if (type == "none") return std::nullopt;
    if (type == "bbox") return StereoBBox{box_arg(reply.value("left", json())), box_arg(reply.value("right", json()))};
    throw Error(ErrorCode::ProtocolViolation, fmt::format("unexpected reply type '{}'", type));
  }

 private:
  void send(const json& msg) {
    try {
      process_->write_line(msg.dump());
    } catch (const Error&) {
      process_.reset();
      throw;
    }
  }

  json receive() {
    std::optional<std::string> line;
    try {
      line = process_->read_line(timeout_);
    } catch (const Error&) {
      process_.reset();
      throw;
    }
    if (!line) {
      process_.reset();
      throw Error(ErrorCode::TrackerCrashed, "tracker closed its output");
    }
    try {
      json j = json::parse(*line);
      if (!j.is_object()) throw Error(ErrorCode::ProtocolViolation, "reply must be a JSON object");
      return j;
    } catch (const json::parse_error&) {
      throw Error(ErrorCode::ProtocolViolation, "reply is not JSON: " + *line);
    }
  }

  std::string command_;
  std::chrono::milliseconds timeout_;
  std::unique_ptr<LineProcess> process_;
};

}  // namespace

std::unique_ptr<Tracker> make_tracker(const TrackerHandle& handle, const VideoRecord& video,
                                      const EvalConfig& config) {
  if (handle.kind == TrackerHandle::Kind::External)
    return std::make_unique<ExternalTracker>(handle.target, config.frame_timeout_s);
  if (handle.target == "ncc")
    return std::make_unique<NccTracker>(NccTrackerOptions{config.ncc_search_radius_px, config.ncc_occlusion_threshold});
  if (handle.target == "oracle") return std::make_unique<OracleTracker>(video);
  if (handle.target == "null") return std::make_unique<NullTracker>();
  if (handle.target == "static") return std::make_unique<StaticTracker>();
  throw Error(ErrorCode::UnknownTracker, "unknown builtin tracker " + handle.target);
}

}  // namespace sbench
