#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "sbench/config.hpp"
#include "sbench/dataset.hpp"

namespace sbench {

struct FrameInput {
  int index = 0;
  std::filesystem::path left;
  std::filesystem::path right;
};

/// A stereo bounding-box tracker. `init` is called at every anchor; `track`
/// once per following frame, in order. Returning std::nullopt reports the
/// target as not visible.
class Tracker {
 public:
  virtual ~Tracker() = default;
  virtual void init(const FrameInput& frame, const StereoBBox& box) = 0;
  virtual std::optional<StereoBBox> track(const FrameInput& frame) = 0;
};

/// "builtin:<name>" or "exec:<shell command>".
struct TrackerHandle {
  enum class Kind { Builtin, External };

  Kind kind = Kind::Builtin;
  std::string target;  // builtin name or command line
  bool deterministic = true;

  static TrackerHandle parse(std::string_view spec);
  std::string label() const;
};

/// Builtins: "ncc" (template matching baseline), "oracle" (echoes ground
/// truth, none on invisible frames), "null" (always none), "static"
/// (repeats the anchor box). Throws UnknownTracker.
std::unique_ptr<Tracker> make_tracker(const TrackerHandle& handle, const VideoRecord& video,
                                      const EvalConfig& config);

}  // namespace sbench
