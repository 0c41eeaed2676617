#include "sbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "sbench/error.hpp"

namespace sbench {

namespace fs = std::filesystem;

std::vector<int> generate_anchors(std::span<const FrameLabel> labels, int spacing, int min_tail) {
  if (spacing < 1) throw Error(ErrorCode::InvalidConfig, "anchor spacing must be >= 1");
  const int n = static_cast<int>(labels.size());
  std::vector<int> anchors;
  int next = 0;
  for (int f = 0; f + min_tail < n; ++f) {
    if (f < next || !labels[static_cast<std::size_t>(f)].is_valid()) continue;
    anchors.push_back(f);
    next = f + spacing;
  }
  if (anchors.empty()) throw Error(ErrorCode::NoValidFrames, "no frame can host an anchor");
  return anchors;
}

AnchorRun run_anchor(Tracker& tracker, const VideoRecord& video, int anchor, std::vector<TrackerEvent>* events) {
  AnchorRun run;
  run.video = video.key();
  run.anchor_frame = anchor;
  const FrameLabel& label = video.labels.at(static_cast<std::size_t>(anchor));
  if (!label.bbox) throw Error(ErrorCode::InvalidAnchor, fmt::format("{}: anchor {} has no bbox", video.key(), anchor));

  const auto record_event = [&](int frame, const Error& e) {
    if (events)
      events->push_back({video.key(), anchor, frame, std::string(to_string(e.code())), e.what()});
  };
  const auto fatal = [](const Error& e) {
    return e.code() == ErrorCode::ProtocolViolation || e.code() == ErrorCode::IoError;
  };

  bool alive = true;
  try {
    tracker.init({anchor, video.left_frame_path(anchor), video.right_frame_path(anchor)}, *label.bbox);
  } catch (const Error& e) {
    if (fatal(e)) throw;
    record_event(anchor + 1, e);
    alive = false;
  }
  for (int f = anchor + 1; f < video.frame_count; ++f) {
    FramePrediction p{f, std::nullopt};
    if (alive) {
      try {
        p.bbox = tracker.track({f, video.left_frame_path(f), video.right_frame_path(f)});
      } catch (const Error& e) {
        if (fatal(e)) throw;
        record_event(f, e);
        alive = false;
      }
    }
    run.predictions.push_back(p);
  }
  return run;
}

EvaluationResult evaluate(const SubsetRecord& dataset, const TrackerFactory& factory, const EvalConfig& config,
                          const std::string& tracker_name, const EvaluateOptions& options) {
  config.validate();
  const auto videos = dataset.videos();
  struct Slot {
    std::vector<AnchorRun> runs;
    std::vector<TrackerEvent> events;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(videos.size());

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < videos.size(); i = next++) {
      try {
        const VideoRecord& v = *videos[i];
        auto tracker = factory(v);
        for (int anchor : v.anchors) slots[i].runs.push_back(run_anchor(*tracker, v, anchor, &slots[i].events));
      } catch (...) {
        slots[i].error = std::current_exception();
      }
    }
  };
  int jobs = options.jobs > 0 ? options.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min<int>(jobs, static_cast<int>(std::max<std::size_t>(1, videos.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  EvaluationResult result;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    if (slots[i].error) std::rethrow_exception(slots[i].error);
    result.runs[videos[i]->key()] = std::move(slots[i].runs);
    result.events.insert(result.events.end(), slots[i].events.begin(), slots[i].events.end());
  }
  result.report = score_runs(dataset, result.runs, config, tracker_name);
  return result;
}

EvaluationResult evaluate(const SubsetRecord& dataset, const TrackerHandle& tracker, const EvalConfig& config,
                          const EvaluateOptions& options) {
  // Fail fast on unknown names before spawning workers.
  if (tracker.kind == TrackerHandle::Kind::Builtin && !dataset.cases.empty())
    (void)make_tracker(tracker, dataset.cases.front().videos.front(), config);
  const TrackerFactory factory = [&](const VideoRecord& v) { return make_tracker(tracker, v, config); };
  return evaluate(dataset, factory, config, tracker.label(), options);
}

void save_runs(const RunSet& runs, const fs::path& dir) {
  for (const auto& [key, list] : runs) {
    for (const auto& run : list) save_predictions(run, dir / key / fmt::format("anchor_{:06d}.json", run.anchor_frame));
  }
}

RunSet load_runs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "no runs directory at " + dir.string());
  RunSet runs;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    AnchorRun run = load_predictions(f);
    runs[run.video].push_back(std::move(run));
  }
  for (auto& [key, list] : runs)
    std::sort(list.begin(), list.end(), [](const AnchorRun& a, const AnchorRun& b) { return a.anchor_frame < b.anchor_frame; });
  return runs;
}

}  // namespace sbench
