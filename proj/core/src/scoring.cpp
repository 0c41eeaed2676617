#include "sbench/scoring.hpp"

#include <nlohmann/json.hpp>

#include "sbench/error.hpp"

namespace sbench {

using nlohmann::json;

AnchorScores score_anchor(const AnchorRun& run, const VideoRecord& video, const EvalConfig& config) {
  AnchorScores a;
  a.anchor_frame = run.anchor_frame;
  const auto outcomes2d = frame_outcomes_2d(run, video.labels, config.stereo_iou_combine);
  a.r2d = score_anchor_2d(outcomes2d, config);
  a.r3d = score_anchor_3d(frame_outcomes_3d(run, video.labels, video.calibration), config);
  a.sequence = anchor_sequence(outcomes2d, a.r2d.failure);
  return a;
}

namespace {

// Rows of (value, weight) for one metric across child entries.
struct Column {
  std::vector<std::optional<double>> values;
  std::vector<double> weights;

  void add(const std::optional<double>& v, double w) {
    values.push_back(v);
    weights.push_back(w);
  }
  std::optional<double> mean() const { return weighted_average(values, weights); }
  std::optional<double> stddev() const { return weighted_stddev(values, weights); }
};

MetricSummary summarize_anchors(const std::vector<const AnchorScores*>& anchors) {
  Column acc, e2d, rob2d, e3d, rob3d;
  MetricSummary s;
  for (const AnchorScores* a : anchors) {
    const double w2 = a->r2d.n;
    const double w3 = a->r3d.n;
    const double wr = a->r2d.robustness_denominator();
    acc.add(a->r2d.accuracy, w2);
    e2d.add(a->r2d.error2d_px, w2);
    rob2d.add(a->r2d.robustness, wr);
    e3d.add(a->r3d.error3d_mm, w3);
    rob3d.add(a->r3d.robustness, wr);
    s.n2d += w2;
    s.n3d += w3;
    s.n_rob += wr;
  }
  s.anchors = static_cast<int>(anchors.size());
  s.accuracy = acc.mean();
  s.error2d_px = e2d.mean();
  s.error2d_std_px = e2d.stddev();
  s.robustness2d = rob2d.mean();
  s.error3d_mm = e3d.mean();
  s.error3d_std_mm = e3d.stddev();
  s.robustness3d = rob3d.mean();
  return s;
}

// Weighted average of child summaries, with spread re-derived from the
// underlying anchors.
MetricSummary summarize_children(const std::vector<const MetricSummary*>& children,
                                 const std::vector<const AnchorScores*>& anchors) {
  Column acc, e2d, rob2d, e3d, rob3d;
  for (const MetricSummary* c : children) {
    acc.add(c->accuracy, c->n2d);
    e2d.add(c->error2d_px, c->n2d);
    rob2d.add(c->robustness2d, c->n_rob);
    e3d.add(c->error3d_mm, c->n3d);
    rob3d.add(c->robustness3d, c->n_rob);
  }
  const MetricSummary flat = summarize_anchors(anchors);
  MetricSummary s;
  s.accuracy = acc.mean();
  s.error2d_px = e2d.mean();
  s.robustness2d = rob2d.mean();
  s.error3d_mm = e3d.mean();
  s.robustness3d = rob3d.mean();
  s.error2d_std_px = flat.error2d_std_px;
  s.error3d_std_mm = flat.error3d_std_mm;
  s.n2d = flat.n2d;
  s.n3d = flat.n3d;
  s.n_rob = flat.n_rob;
  s.anchors = flat.anchors;
  return s;
}

std::optional<double> try_eao(const ScoreSequence& seq, const std::optional<EaoWindow>& window, bool literal) {
  if (!window || seq.empty()) return std::nullopt;
  try {
    return eao(seq, *window, literal);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyWindow) return std::nullopt;
    throw;
  }
}

}  // namespace

MetricsReport score_runs(const SubsetRecord& dataset, const RunSet& runs, const EvalConfig& config,
                         const std::string& tracker_name) {
  MetricsReport report;
  report.tracker = tracker_name;
  report.dataset = dataset.id;
  report.config = config;

  for (const auto& c : dataset.cases) {
    for (const auto& v : c.videos) {
      auto it = runs.find(v.key());
      if (it == runs.end() || it->second.empty()) continue;
      VideoScores vs;
      vs.case_id = c.id;
      vs.video_id = v.id;
      std::vector<ScoreSequence> seqs;
      for (const auto& run : it->second) {
        vs.anchors.push_back(score_anchor(run, v, config));
        seqs.push_back(vs.anchors.back().sequence);
      }
      vs.sequence = merge_anchor_sequences(seqs);
      std::vector<const AnchorScores*> ptrs;
      for (const auto& a : vs.anchors) ptrs.push_back(&a);
      vs.summary = summarize_anchors(ptrs);
      report.videos.push_back(std::move(vs));
    }
  }

  std::vector<int> lengths;
  for (const auto& v : report.videos) lengths.push_back(static_cast<int>(v.sequence.size()));
  if (lengths.size() >= 2) report.window = eao_window(lengths);
  const bool literal = config.eao_literal_denominator;

  std::vector<const MetricSummary*> case_summaries;
  std::vector<const AnchorScores*> all_anchors;
  std::vector<ScoreSequence> case_sequences;
  for (const auto& c : dataset.cases) {
    std::vector<const MetricSummary*> video_summaries;
    std::vector<const AnchorScores*> case_anchors;
    std::vector<ScoreSequence> video_sequences;
    for (auto& v : report.videos) {
      if (v.case_id != c.id) continue;
      for (auto& a : v.anchors) a.eao = try_eao(a.sequence, report.window, literal);
      v.summary.eao = try_eao(v.sequence, report.window, literal);
      video_summaries.push_back(&v.summary);
      video_sequences.push_back(v.sequence);
      for (const auto& a : v.anchors) case_anchors.push_back(&a);
    }
    if (video_summaries.empty()) continue;
    CaseScores cs;
    cs.id = c.id;
    cs.summary = summarize_children(video_summaries, case_anchors);
    cs.sequence = merge_video_sequences(video_sequences);
    cs.summary.eao = try_eao(cs.sequence, report.window, literal);
    report.cases.push_back(std::move(cs));
    all_anchors.insert(all_anchors.end(), case_anchors.begin(), case_anchors.end());
  }
  for (const auto& cs : report.cases) case_summaries.push_back(&cs.summary);

  if (!report.videos.empty()) {
    std::vector<ScoreSequence> video_sequences;
    for (const auto& v : report.videos) video_sequences.push_back(v.sequence);
    report.subset_sequence = merge_video_sequences(video_sequences);
    report.subset = summarize_children(case_summaries, all_anchors);
    report.subset.eao = try_eao(report.subset_sequence, report.window, literal);
  }
  return report;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

json sequence_json(const ScoreSequence& s) {
  json a = json::array();
  for (const auto& e : s.entries) a.push_back(e ? json(*e) : json("ignore"));
  return a;
}

}  // namespace

json to_json(const MetricSummary& s) {
  return json{{"accuracy", opt(s.accuracy)},
              {"error2d_px", opt(s.error2d_px)},
              {"error2d_std_px", opt(s.error2d_std_px)},
              {"robustness2d", opt(s.robustness2d)},
              {"error3d_mm", opt(s.error3d_mm)},
              {"error3d_std_mm", opt(s.error3d_std_mm)},
              {"robustness3d", opt(s.robustness3d)},
              {"eao", opt(s.eao)},
              {"n2d", s.n2d},
              {"n3d", s.n3d},
              {"n_robustness", s.n_rob},
              {"anchors", s.anchors}};
}

json to_json(const MetricsReport& r) {
  json videos = json::array();
  for (const auto& v : r.videos) {
    json anchors = json::array();
    for (const auto& a : v.anchors) {
      anchors.push_back({{"anchor_frame", a.anchor_frame},
                         {"accuracy", opt(a.r2d.accuracy)},
                         {"error2d_px", opt(a.r2d.error2d_px)},
                         {"robustness2d", opt(a.r2d.robustness)},
                         {"failure2d_frame", opt(a.r2d.failure_frame)},
                         {"n2d", a.r2d.n},
                         {"error3d_mm", opt(a.r3d.error3d_mm)},
                         {"robustness3d", opt(a.r3d.robustness)},
                         {"failure3d_frame", opt(a.r3d.failure_frame)},
                         {"n3d", a.r3d.n},
                         {"n_valid", a.r2d.n_valid},
                         {"n_excess", a.r2d.n_excess},
                         {"eao", opt(a.eao)}});
    }
    videos.push_back({{"case", v.case_id},
                      {"video", v.video_id},
                      {"summary", to_json(v.summary)},
                      {"anchors", std::move(anchors)},
                      {"sequence_length", v.sequence.size()}});
  }
  json cases = json::array();
  for (const auto& c : r.cases) cases.push_back({{"case", c.id}, {"summary", to_json(c.summary)}});
  json window = r.window ? json{{"n_min", r.window->n_min}, {"n_max", r.window->n_max}} : json(nullptr);
  return json{{"tracker", r.tracker},
              {"dataset", r.dataset},
              {"config", to_json(r.config)},
              {"subset", to_json(r.subset)},
              {"eao_window", window},
              {"cases", std::move(cases)},
              {"videos", std::move(videos)},
              {"subset_sequence", sequence_json(r.subset_sequence)}};
}

}  // namespace sbench
