#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sbench/config.hpp"
#include "sbench/dataset.hpp"
#include "sbench/eao.hpp"
#include "sbench/metrics2d.hpp"
#include "sbench/metrics3d.hpp"

namespace sbench {

struct AnchorScores {
  int anchor_frame = 0;
  AnchorResult2D r2d;
  AnchorResult3D r3d;
  ScoreSequence sequence;
  std::optional<double> eao;
};

/// Frame-weighted aggregate at video, case or subset level.
struct MetricSummary {
  std::optional<double> accuracy;
  std::optional<double> error2d_px;
  std::optional<double> error2d_std_px;
  std::optional<double> robustness2d;
  std::optional<double> error3d_mm;
  std::optional<double> error3d_std_mm;
  std::optional<double> robustness3d;
  std::optional<double> eao;
  double n2d = 0.0;   // weight behind accuracy / error2d
  double n3d = 0.0;   // weight behind error3d
  double n_rob = 0.0; // weight behind both robustness scores
  int anchors = 0;
};

struct VideoScores {
  std::string case_id;
  std::string video_id;
  std::vector<AnchorScores> anchors;
  MetricSummary summary;
  ScoreSequence sequence;
};

struct CaseScores {
  std::string id;
  MetricSummary summary;
  ScoreSequence sequence;
};

struct MetricsReport {
  std::string tracker;
  std::string dataset;
  EvalConfig config;
  std::vector<VideoScores> videos;
  std::vector<CaseScores> cases;
  MetricSummary subset;
  ScoreSequence subset_sequence;
  std::optional<EaoWindow> window;
};

/// Runs keyed by VideoRecord::key(); each list ordered by anchor frame.
using RunSet = std::map<std::string, std::vector<AnchorRun>>;

AnchorScores score_anchor(const AnchorRun& run, const VideoRecord& video, const EvalConfig& config);

/// Pure function of the runs: per-anchor metrics, frame-weighted video, case
/// and subset aggregates, merged overlap sequences and EAO. Videos without a
/// run list contribute nothing. The EAO window comes from the lengths of the
/// merged video sequences.
MetricsReport score_runs(const SubsetRecord& dataset, const RunSet& runs, const EvalConfig& config,
                         const std::string& tracker_name);

nlohmann::json to_json(const MetricSummary& s);
nlohmann::json to_json(const MetricsReport& report);

}  // namespace sbench
