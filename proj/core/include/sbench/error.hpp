#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sbench {

enum class ErrorCode {
  // dataset-model
  MissingCalibration,
  MalformedLabel,
  EpipolarViolation,
  NonIncreasingAnchors,
  InvalidAnchor,
  IoError,
  SchemaMismatch,
  // geometry
  InvalidCalibration,
  NonPositiveDisparity,
  BehindCamera,
  CameraInsideSphere,
  // eao / aggregation
  EmptyInput,
  TooFewVideos,
  EmptyWindow,
  AllZeroWeights,
  // harness
  NoValidFrames,
  TemplateOutOfBounds,
  TrackerCrashed,
  ProtocolViolation,
  Timeout,
  UnknownTracker,
  // synth
  TrajectoryBehindCamera,
  InvalidSceneSpec,
  // config / service
  InvalidConfig,
  OutOfRange,
  ConcurrentEdit,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type carried across the library; `code()` is the
/// machine-readable discriminator surfaced by the CLI and the HTTP service.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sbench
