// sbench: command-line entry point.

#include <cctype>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sbench/annotation.hpp"
#include "sbench/config.hpp"
#include "sbench/dataset.hpp"
#include "sbench/error.hpp"
#include "sbench/geometry.hpp"
#include "sbench/harness.hpp"
#include "sbench/report.hpp"
#include "sbench/stats.hpp"
#include "sbench/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sbench;

namespace {

enum Exit { kOk = 0, kOther = 1, kValidation = 2, kTracker = 3, kIo = 4 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError: return kIo;
    case ErrorCode::TrackerCrashed:
    case ErrorCode::ProtocolViolation:
    case ErrorCode::Timeout:
    case ErrorCode::UnknownTracker: return kTracker;
    case ErrorCode::MissingCalibration:
    case ErrorCode::MalformedLabel:
    case ErrorCode::EpipolarViolation:
    case ErrorCode::NonIncreasingAnchors:
    case ErrorCode::InvalidAnchor:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::InvalidCalibration:
    case ErrorCode::NonPositiveDisparity:
    case ErrorCode::NoValidFrames:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidSceneSpec:
    case ErrorCode::TrajectoryBehindCamera: return kValidation;
    default: return kOther;
  }
}

void print_error(std::string_view code, std::string_view message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
}

// Command-line overrides of EvalConfig; applied on top of --config.
struct ConfigFlags {
  std::string file;
  std::optional<double> iou_fail_threshold;
  std::optional<int> fail_streak;
  std::optional<double> err3d_fail_mm;
  std::optional<int> anchor_spacing;
  std::optional<std::string> combine;
  std::optional<double> sphere_radius_mm;
  bool literal_denominator = false;
  std::optional<double> frame_timeout_s;

  void add(CLI::App* cmd) {
    cmd->add_option("--config", file, "JSON file with flat EvalConfig keys")->check(CLI::ExistingFile);
    cmd->add_option("--iou-fail-threshold", iou_fail_threshold);
    cmd->add_option("--fail-streak", fail_streak);
    cmd->add_option("--err3d-fail-mm", err3d_fail_mm);
    cmd->add_option("--anchor-spacing", anchor_spacing);
    cmd->add_option("--stereo-iou-combine", combine)->check(CLI::IsMember({"mean", "min"}));
    cmd->add_option("--sphere-radius-mm", sphere_radius_mm);
    cmd->add_flag("--eao-literal-denominator", literal_denominator);
    cmd->add_option("--frame-timeout", frame_timeout_s, "Seconds per external tracker reply");
  }

  EvalConfig resolve() const {
    EvalConfig c = file.empty() ? EvalConfig{} : load_config(file);
    if (iou_fail_threshold) c.iou_fail_threshold = *iou_fail_threshold;
    if (fail_streak) c.fail_streak = *fail_streak;
    if (err3d_fail_mm) c.err3d_fail_mm = *err3d_fail_mm;
    if (anchor_spacing) c.anchor_spacing = *anchor_spacing;
    if (combine) c.stereo_iou_combine = *combine == "min" ? StereoIouCombine::Min : StereoIouCombine::Mean;
    if (sphere_radius_mm) c.sphere_radius_mm = *sphere_radius_mm;
    if (literal_denominator) c.eao_literal_denominator = true;
    if (frame_timeout_s) c.frame_timeout_s = *frame_timeout_s;
    c.validate();
    return c;
  }
};

std::string slug(const std::string& label) {
  std::string s;
  for (char ch : label) s += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  return s;
}

std::vector<std::string> tracker_dirs(const fs::path& eval_dir) {
  std::vector<std::string> out;
  const fs::path root = eval_dir / "trackers";
  if (!fs::is_directory(root)) throw Error(ErrorCode::IoError, "no trackers/ directory in " + eval_dir.string());
  for (const auto& e : fs::directory_iterator(root))
    if (fs::exists(e.path() / "evaluation.json")) out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

// -- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string dataset;
  std::vector<std::string> trackers;
  std::string out;
  int jobs = 0;
  double epipolar_tol = 1.0;
  bool svg = false;
  ConfigFlags config;
};

int run_evaluate(const EvaluateArgs& a) {
  const EvalConfig config = a.config.resolve();
  const SubsetRecord dataset = load_dataset(a.dataset, {a.epipolar_tol});
  std::vector<MetricsReport> reports;
  std::set<std::string> used;
  for (const auto& spec : a.trackers) {
    const TrackerHandle handle = TrackerHandle::parse(spec);
    std::string name = slug(handle.label());
    while (!used.insert(name).second) name += "_";
    EvaluationResult result = evaluate(dataset, handle, config, {a.jobs});
    const fs::path dir = fs::path(a.out) / "trackers" / name;
    fs::remove_all(dir / "runs");
    save_runs(result.runs, dir / "runs");
    json events = json::array();
    for (const auto& e : result.events)
      events.push_back({{"video", e.video}, {"anchor_frame", e.anchor_frame}, {"frame", e.frame}, {"kind", e.kind},
                        {"message", e.message}});
    const json doc{{"tracker", handle.label()},
                   {"deterministic", handle.deterministic},
                   {"dataset_path", fs::absolute(a.dataset).lexically_normal().string()},
                   {"config", to_json(config)},
                   {"events", events},
                   {"report", to_json(result.report)}};
    write_file_atomic(dir / "evaluation.json", doc.dump(2) + "\n");
    for (const auto& e : result.events)
      std::cerr << fmt::format("{}: {} anchor {} frame {}: {}\n", e.kind, e.video, e.anchor_frame, e.frame, e.message);
    reports.push_back(std::move(result.report));
  }
  emit_report(reports, a.out, {a.svg});
  json ranking = json::array();
  for (const auto& r : rank_trackers(reports))
    ranking.push_back({{"rank", r.rank}, {"tracker", r.tracker}, {"eao", r.eao ? json(*r.eao) : json(nullptr)}});
  std::cout << json{{"out", a.out}, {"ranking", ranking}}.dump(2) << "\n";
  return kOk;
}

// -- report -----------------------------------------------------------------

struct ReportArgs {
  std::string dataset;
  std::vector<std::string> evals;
  std::string out;
  double epipolar_tol = 1.0;
  bool svg = false;
};

int run_report(const ReportArgs& a) {
  const SubsetRecord dataset = load_dataset(a.dataset, {a.epipolar_tol});
  std::vector<MetricsReport> reports;
  for (const auto& eval_dir : a.evals) {
    for (const auto& dir : tracker_dirs(eval_dir)) {
      const json doc = json::parse(read_file(fs::path(dir) / "evaluation.json"));
      const EvalConfig config = config_from_json(doc.at("config"));
      const RunSet runs = load_runs(fs::path(dir) / "runs");
      reports.push_back(score_runs(dataset, runs, config, doc.at("tracker").get<std::string>()));
    }
  }
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no evaluations found");
  emit_report(reports, a.out, {a.svg});
  return kOk;
}

// -- synth ------------------------------------------------------------------

int run_synth(const std::string& out, std::uint64_t seed, const SynthOptions& options) {
  const auto scenes = synth_dataset(out, seed, options);
  std::cout << json{{"out", out}, {"videos", scenes.size()}, {"seed", seed}}.dump() << "\n";
  return kOk;
}

// -- stats ------------------------------------------------------------------

int run_stats(const std::string& dataset_dir, bool ncc, double tol) {
  const SubsetRecord dataset = load_dataset(dataset_dir, {tol});
  json videos = json::array();
  for (const VideoRecord* vp : dataset.videos()) {
    const VideoRecord& v = *vp;
    json j = to_json(dataset_stats(v, {ncc}));
    j["video"] = v.key();
    videos.push_back(std::move(j));
  }
  std::cout << json{{"dataset", dataset.id}, {"videos", videos}}.dump(2) << "\n";
  return kOk;
}

// -- validate-dataset -------------------------------------------------------

struct ValidateArgs {
  std::string dataset;
  double tol = 1.0;
  bool rederive = false;
  double bbox_tol = 1e-6;
  double sphere_radius_mm = kDefaultSphereRadiusMm;
  bool check_frames = true;
};

json error_json(std::string_view code, std::string message, std::optional<int> frame = std::nullopt) {
  json j{{"code", code}, {"message", std::move(message)}};
  if (frame) j["frame"] = *frame;
  return j;
}

double max_corner_gap(const BBox& a, const BBox& b) {
  return std::max({std::abs(a.u_min - b.u_min), std::abs(a.v_min - b.v_min), std::abs(a.u_max - b.u_max),
                   std::abs(a.v_max - b.v_max)});
}

json validate_one(const fs::path& dir, const std::string& case_id, const ValidateArgs& a) {
  json errors = json::array();
  double worst_gap = 0.0;
  try {
    const VideoRecord v = load_video(dir, case_id, {a.tol});
    if (a.check_frames) {
      for (int f = 0; f < v.frame_count; ++f)
        for (const fs::path& p : {v.left_frame_path(f), v.right_frame_path(f)})
          if (!fs::exists(p)) errors.push_back(error_json("IoError", "missing image " + p.string(), f));
    }
    if (a.rederive) {
      for (const FrameLabel& l : v.labels) {
        if (!l.keypoint_left || !l.keypoint_right || !l.bbox) continue;
        try {
          const StereoBBox box = sphere_to_bbox(triangulate(*l.keypoint_left, *l.keypoint_right, v.calibration),
                                                a.sphere_radius_mm, v.calibration);
          const double gap = std::max(max_corner_gap(box.left, l.bbox->left), max_corner_gap(box.right, l.bbox->right));
          worst_gap = std::max(worst_gap, gap);
          if (gap > a.bbox_tol)
            errors.push_back(error_json("BBoxMismatch", fmt::format("stored bbox differs by {:.3g} px", gap), l.frame_index));
        } catch (const Error& e) {
          errors.push_back(error_json(to_string(e.code()), e.what(), l.frame_index));
        }
      }
    }
  } catch (const Error& e) {
    errors.push_back(error_json(to_string(e.code()), e.what()));
  } catch (const std::exception& e) {
    errors.push_back(error_json("MalformedLabel", e.what()));
  }
  json j{{"video", case_id + "/" + dir.filename().string()}, {"errors", errors}};
  if (a.rederive) j["max_bbox_gap_px"] = worst_gap;
  return j;
}

int run_validate(const ValidateArgs& a) {
  if (!fs::is_directory(a.dataset)) throw Error(ErrorCode::IoError, "dataset root not found: " + a.dataset);
  std::vector<fs::path> videos;
  for (const auto& c : fs::directory_iterator(a.dataset)) {
    if (!c.is_directory() || c.path().filename().string().front() == '.') continue;
    for (const auto& v : fs::directory_iterator(c.path()))
      if (v.is_directory()) videos.push_back(v.path());
  }
  std::sort(videos.begin(), videos.end());
  json results = json::array();
  std::size_t total = 0;
  for (const auto& v : videos) {
    json r = validate_one(v, v.parent_path().filename().string(), a);
    total += r["errors"].size();
    results.push_back(std::move(r));
  }
  std::cout << json{{"dataset", a.dataset}, {"videos", results}, {"error_count", total}}.dump(2) << "\n";
  if (videos.empty()) {
    print_error("EmptyInput", "no videos found");
    return kValidation;
  }
  return total == 0 ? kOk : kValidation;
}

// -- annotate-serve ---------------------------------------------------------

AnnotationServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int run_serve(const std::string& dataset, const std::string& host, int port, const AnnotationOptions& options) {
  AnnotationStore store(dataset, options);
  AnnotationServer server(store);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  int bound = port;
  if (port == 0) {
    bound = server.bind_any_port(host);
    if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host);
  }
  std::cout << json{{"listening", fmt::format("http://{}:{}", host, bound)}}.dump() << std::endl;
  const bool ok = port == 0 ? server.listen_after_bind() : server.listen(host, port);
  g_server = nullptr;
  if (!ok) throw Error(ErrorCode::IoError, fmt::format("cannot listen on {}:{}", host, port));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stereo bounding-box tracker benchmark"};
  app.require_subcommand(1);

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Run trackers over a dataset and write a report directory");
  evaluate_cmd->add_option("--dataset", ev.dataset)->required();
  evaluate_cmd->add_option("--tracker", ev.trackers, "builtin:<name> or exec:<command>; repeatable")->required();
  evaluate_cmd->add_option("--out", ev.out)->required();
  evaluate_cmd->add_option("--jobs", ev.jobs, "Videos evaluated in parallel (default: logical cores)");
  evaluate_cmd->add_option("--epipolar-tol", ev.epipolar_tol);
  evaluate_cmd->add_flag("--svg", ev.svg);
  ev.config.add(evaluate_cmd);

  ReportArgs rp;
  auto* report_cmd = app.add_subcommand("report", "Re-score persisted predictions and write the tables");
  report_cmd->add_option("--dataset", rp.dataset)->required();
  report_cmd->add_option("--from", rp.evals, "evaluate output directory; repeatable")->required();
  report_cmd->add_option("--out", rp.out)->required();
  report_cmd->add_option("--epipolar-tol", rp.epipolar_tol);
  report_cmd->add_flag("--svg", rp.svg);

  std::string synth_out;
  std::uint64_t seed = 0;
  SynthOptions so;
  std::string motion = "mixed";
  bool no_occlusions = false;
  auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic dataset");
  synth_cmd->add_option("--out", synth_out)->required();
  synth_cmd->add_option("--seed", seed);
  synth_cmd->add_option("--videos", so.videos)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--cases", so.cases)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--frames", so.frames)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--width", so.width)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--height", so.height)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--motion", motion)->check(CLI::IsMember({"translation", "mixed"}));
  synth_cmd->add_flag("--no-occlusions", no_occlusions);
  synth_cmd->add_option("--anchor-spacing", so.anchor_spacing)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--sphere-radius-mm", so.sphere_radius_mm)->check(CLI::PositiveNumber);

  std::string stats_dataset;
  bool no_ncc = false;
  double stats_tol = 1.0;
  auto* stats_cmd = app.add_subcommand("stats", "Per-video motion and appearance statistics");
  stats_cmd->add_option("--dataset", stats_dataset)->required();
  stats_cmd->add_flag("--no-ncc", no_ncc, "Skip the appearance statistic (no image reads)");
  stats_cmd->add_option("--epipolar-tol", stats_tol);

  ValidateArgs va;
  bool skip_frames = false;
  auto* validate_cmd = app.add_subcommand("validate-dataset", "Check every dataset invariant");
  validate_cmd->add_option("--dataset", va.dataset)->required();
  validate_cmd->add_option("--tol", va.tol, "Epipolar row tolerance in px");
  validate_cmd->add_flag("--rederive-bboxes", va.rederive, "Recompute boxes from keypoints and compare");
  validate_cmd->add_option("--bbox-tol", va.bbox_tol, "Allowed rederivation gap in px");
  validate_cmd->add_option("--sphere-radius-mm", va.sphere_radius_mm);
  validate_cmd->add_flag("--skip-frames", skip_frames, "Do not check that frame images exist");

  std::string serve_dataset, host = "127.0.0.1";
  int port = 8080;
  AnnotationOptions ao;
  std::string static_dir;
  auto* serve_cmd = app.add_subcommand("annotate-serve", "Serve the annotation HTTP API");
  serve_cmd->add_option("--dataset", serve_dataset)->required();
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port, "0 picks a free port");
  serve_cmd->add_option("--static", static_dir, "Frontend build to serve at /")->check(CLI::ExistingDirectory);
  serve_cmd->add_flag("--strict-epipolar", ao.strict_epipolar, "Reject off-row right clicks instead of snapping");
  serve_cmd->add_option("--epipolar-tol", ao.epipolar_tol_px);
  serve_cmd->add_option("--sphere-radius-mm", ao.sphere_radius_mm);
  serve_cmd->add_option("--anchor-spacing", ao.anchor_spacing);
  serve_cmd->add_option("--drift-threshold", ao.drift_threshold_px);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("UsageError", e.what());
    return kValidation;
  }

  try {
    if (*evaluate_cmd) return run_evaluate(ev);
    if (*report_cmd) return run_report(rp);
    if (*synth_cmd) {
      so.motion = motion == "translation" ? SynthMotion::Translation : SynthMotion::Mixed;
      so.occlusions = !no_occlusions;
      return run_synth(synth_out, seed, so);
    }
    if (*stats_cmd) return run_stats(stats_dataset, !no_ncc, stats_tol);
    if (*validate_cmd) {
      va.check_frames = !skip_frames;
      return run_validate(va);
    }
    if (*serve_cmd) {
      ao.static_dir = static_dir;
      return run_serve(serve_dataset, host, port, ao);
    }
  } catch (const Error& e) {
    print_error(to_string(e.code()), e.what());
    return exit_code(e.code());
  } catch (const nlohmann::json::exception& e) {
    print_error("SchemaMismatch", e.what());
    return kValidation;
  } catch (const fs::filesystem_error& e) {
    print_error("IoError", e.what());
    return kIo;
  } catch (const std::exception& e) {
    print_error("Internal", e.what());
    return kOther;
  }
  return kOther;
}
