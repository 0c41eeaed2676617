#include "sbench/error.hpp"

namespace sbench {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingCalibration: return "MissingCalibration";
    case ErrorCode::MalformedLabel: return "MalformedLabel";
    case ErrorCode::EpipolarViolation: return "EpipolarViolation";
    case ErrorCode::NonIncreasingAnchors: return "NonIncreasingAnchors";
    case ErrorCode::InvalidAnchor: return "InvalidAnchor";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InvalidCalibration: return "InvalidCalibration";
    case ErrorCode::NonPositiveDisparity: return "NonPositiveDisparity";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::CameraInsideSphere: return "CameraInsideSphere";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::TooFewVideos: return "TooFewVideos";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::NoValidFrames: return "NoValidFrames";
    case ErrorCode::TemplateOutOfBounds: return "TemplateOutOfBounds";
    case ErrorCode::TrackerCrashed: return "TrackerCrashed";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::UnknownTracker: return "UnknownTracker";
    case ErrorCode::TrajectoryBehindCamera: return "TrajectoryBehindCamera";
    case ErrorCode::InvalidSceneSpec: return "InvalidSceneSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ConcurrentEdit: return "ConcurrentEdit";
  }
  return "Unknown";
}

}  // namespace sbench
