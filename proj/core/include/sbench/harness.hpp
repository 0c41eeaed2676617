#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sbench/config.hpp"
#include "sbench/dataset.hpp"
#include "sbench/scoring.hpp"
#include "sbench/tracker.hpp"

namespace sbench {

/// First valid frame, then repeatedly the first valid frame at least
/// `spacing` frames after the previous anchor. Anchors need `min_tail`
/// frames after them. Throws NoValidFrames when no frame qualifies.
std::vector<int> generate_anchors(std::span<const FrameLabel> labels, int spacing = 50, int min_tail = 10);

/// A crash or timeout that ended an anchor run early.
struct TrackerEvent {
  std::string video;
  int anchor_frame = 0;
  int frame = 0;  // first frame recorded as "none" because of the event
  std::string kind;
  std::string message;
};

using TrackerFactory = std::function<std::unique_ptr<Tracker>(const VideoRecord&)>;

/// Initializes `tracker` at `anchor` and feeds every later frame in order.
/// Crashes and timeouts turn the rest of the run into "none" and append an
/// event; ProtocolViolation propagates.
AnchorRun run_anchor(Tracker& tracker, const VideoRecord& video, int anchor, std::vector<TrackerEvent>* events);

struct EvaluateOptions {
  int jobs = 0;  // video-level parallelism; 0 = hardware concurrency
};

struct EvaluationResult {
  RunSet runs;
  std::vector<TrackerEvent> events;
  MetricsReport report;
};

/// Runs the tracker from every anchor of every video and scores the runs.
/// Videos run in parallel (one tracker instance each); results join by key.
EvaluationResult evaluate(const SubsetRecord& dataset, const TrackerFactory& factory, const EvalConfig& config,
                          const std::string& tracker_name, const EvaluateOptions& options = {});

EvaluationResult evaluate(const SubsetRecord& dataset, const TrackerHandle& tracker, const EvalConfig& config,
                          const EvaluateOptions& options = {});

/// runs/<case>/<video>/anchor_%06d.json, one file per anchor run.
void save_runs(const RunSet& runs, const std::filesystem::path& dir);
RunSet load_runs(const std::filesystem::path& dir);

}  // namespace sbench
