#include "sbench/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include <fmt/format.h>
#include <httplib.h>

#include "sbench/geometry.hpp"
#include "sbench/harness.hpp"

namespace sbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kMetaFile = "annotation.json";
constexpr const char* kSessionsFile = ".annotation_sessions.json";

json keypoint_json(const Keypoint2D& k) { return json::array({k.u, k.v}); }

int count_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) return 0;
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".png") ++n;
  return n;
}

}  // namespace

AnnotationStore::AnnotationStore(fs::path root, AnnotationOptions options)
    : root_(std::move(root)), options_(std::move(options)) {
  if (!fs::is_directory(root_)) throw Error(ErrorCode::IoError, "dataset root not found: " + root_.string());
}

fs::path AnnotationStore::video_dir(const std::string& video) const {
  const auto slash = video.find('/');
  if (slash == std::string::npos || video.find("..") != std::string::npos)
    throw Error(ErrorCode::OutOfRange, "video must be '<case>/<video>'");
  const fs::path dir = root_ / video.substr(0, slash) / video.substr(slash + 1);
  if (!fs::exists(dir / "calibration.json")) throw Error(ErrorCode::OutOfRange, "unknown video " + video);
  return dir;
}

std::mutex& AnnotationStore::video_mutex(const std::string& video) {
  std::lock_guard lock(registry_mutex_);
  auto& m = video_mutexes_[video];
  if (!m) m = std::make_unique<std::mutex>();
  return *m;
}

AnnotationStore::VideoState AnnotationStore::load_state(const std::string& video) const {
  const fs::path dir = video_dir(video);
  VideoState s;
  s.calibration = load_calibration(dir / "calibration.json");
  s.meta = fs::exists(dir / kMetaFile) ? json::parse(read_file(dir / kMetaFile)) : json::object();
  if (fs::exists(dir / "labels.json")) {
    s.labels = load_labels(dir / "labels.json");
    s.unlabelled = s.meta.value("unlabelled", std::vector<int>{});
  } else {
    const int n = count_frames(dir / "frames_left");
    for (int f = 0; f < n; ++f) {
      FrameLabel l;
      l.frame_index = f;
      l.is_visible_in_both_stereo = false;
      s.labels.push_back(l);
      s.unlabelled.push_back(f);
    }
  }
  return s;
}

void AnnotationStore::persist(const std::string& video, VideoState& state) {
  const fs::path dir = video_dir(video);
  VideoRecord record;
  record.id = video;
  record.directory = dir;
  record.calibration = state.calibration;
  record.labels = state.labels;
  record.frame_count = static_cast<int>(state.labels.size());
  try {
    record.anchors = generate_anchors(record.labels, options_.anchor_spacing);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoValidFrames) throw;
  }
  validate_video(record, {options_.epipolar_tol_px});

  state.meta["revision"] = state.revision() + 1;
  state.meta["unlabelled"] = state.unlabelled;
  save_labels(record.labels, dir / "labels.json");
  save_anchors(record.anchors, dir / "anchors.json");
  write_file_atomic(dir / kMetaFile, state.meta.dump(2) + "\n");
}

void AnnotationStore::check_revision(const VideoState& state, std::optional<long> revision) {
  if (revision && *revision != state.revision())
    throw Error(ErrorCode::ConcurrentEdit,
                fmt::format("revision {} is stale (current {})", *revision, state.revision()));
}

void AnnotationStore::check_index(const VideoState& state, int index) {
  if (index < 0 || index >= static_cast<int>(state.labels.size()))
    throw Error(ErrorCode::OutOfRange, fmt::format("frame {} out of range", index));
}

json AnnotationStore::list_videos() const {
  json out = json::array();
  std::vector<fs::path> cases;
  for (const auto& e : fs::directory_iterator(root_))
    if (e.is_directory() && e.path().filename().string().front() != '.') cases.push_back(e.path());
  std::sort(cases.begin(), cases.end());
  for (const auto& c : cases) {
    std::vector<fs::path> videos;
    for (const auto& e : fs::directory_iterator(c))
      if (e.is_directory() && fs::exists(e.path() / "calibration.json")) videos.push_back(e.path());
    std::sort(videos.begin(), videos.end());
    for (const auto& v : videos) {
      const std::string key = c.filename().string() + "/" + v.filename().string();
      const VideoState s = load_state(key);
      out.push_back({{"video", key},
                     {"frame_count", s.labels.size()},
                     {"unlabelled", s.unlabelled.size()},
                     {"revision", s.revision()}});
    }
  }
  return out;
}

json AnnotationStore::get_frame(const std::string& video, int index) {
  std::lock_guard lock(video_mutex(video));
  const VideoState s = load_state(video);
  check_index(s, index);
  const bool unlabelled = std::binary_search(s.unlabelled.begin(), s.unlabelled.end(), index);
  const std::string base = fmt::format("/api/videos/{}/frames/{}", video, index);
  return {{"video", video},
          {"index", index},
          {"frame_count", s.labels.size()},
          {"label", to_json(s.labels[static_cast<std::size_t>(index)])},
          {"unlabelled", unlabelled},
          {"revision", s.revision()},
          {"left_image", base + "/left.png"},
          {"right_image", base + "/right.png"}};
}

fs::path AnnotationStore::frame_image(const std::string& video, int index, View view) {
  const fs::path dir = video_dir(video);
  const fs::path p = dir / (view == View::Left ? "frames_left" : "frames_right") / fmt::format("{:06d}.png", index);
  if (!fs::exists(p)) throw Error(ErrorCode::OutOfRange, fmt::format("frame {} has no image", index));
  return p;
}

KeypointResult AnnotationStore::put_keypoints(const std::string& video, int index, Keypoint2D left, Keypoint2D right,
                                              std::optional<long> revision, const std::string& annotator) {
  std::lock_guard lock(video_mutex(video));
  VideoState s = load_state(video);
  check_index(s, index);

  if (options_.strict_epipolar && !epipolar_consistent(left, right, options_.epipolar_tol_px))
    throw Error(ErrorCode::EpipolarViolation, "right click is off the left click's row");
  right.v = left.v;
  const double d = disparity(left, right);
  if (!(d > 0.0)) throw Error(ErrorCode::NonPositiveDisparity, "the right click must lie left of the left click");

  KeypointResult r;
  r.keypoint_left = left;
  r.keypoint_right = right;
  r.disparity_px = d;
  r.point = reproject(left, d, s.calibration);
  r.bbox = sphere_to_bbox(r.point, options_.sphere_radius_mm, s.calibration);

  FrameLabel& label = s.labels[static_cast<std::size_t>(index)];
  FrameLabel updated = label;
  updated.keypoint_left = left;
  updated.keypoint_right = right;
  updated.bbox = r.bbox;
  updated.is_visible_in_both_stereo = true;
  const auto it = std::lower_bound(s.unlabelled.begin(), s.unlabelled.end(), index);
  const bool was_unlabelled = it != s.unlabelled.end() && *it == index;
  if (updated == label && !was_unlabelled) {
    r.revision = s.revision();
    return r;
  }
  check_revision(s, revision);
  label = updated;
  if (was_unlabelled) s.unlabelled.erase(it);
  if (!annotator.empty()) s.meta["annotators"][std::to_string(index)] = annotator;
  persist(video, s);
  r.revision = s.revision();
  return r;
}

long AnnotationStore::put_flags(const std::string& video, int index, bool is_difficult, bool visible,
                                std::optional<long> revision, const std::string& annotator) {
  std::lock_guard lock(video_mutex(video));
  VideoState s = load_state(video);
  check_index(s, index);
  FrameLabel& label = s.labels[static_cast<std::size_t>(index)];
  FrameLabel updated = label;
  updated.is_difficult = is_difficult;
  updated.is_visible_in_both_stereo = visible;
  if (updated.is_valid() && (!updated.keypoint_left || !updated.bbox))
    throw Error(ErrorCode::MalformedLabel, "place both keypoints before marking the frame visible");
  const auto it = std::lower_bound(s.unlabelled.begin(), s.unlabelled.end(), index);
  const bool was_unlabelled = it != s.unlabelled.end() && *it == index;
  if (updated == label && !was_unlabelled) return s.revision();
  check_revision(s, revision);
  label = updated;
  if (was_unlabelled) s.unlabelled.erase(it);
  if (!annotator.empty()) s.meta["annotators"][std::to_string(index)] = annotator;
  persist(video, s);
  return s.revision();
}

std::vector<DriftEntry> AnnotationStore::review_diff(const std::string& video, std::optional<double> threshold_px) {
  std::lock_guard lock(video_mutex(video));
  const VideoState s = load_state(video);
  const double threshold = threshold_px.value_or(options_.drift_threshold_px);
  std::vector<DriftEntry> out;
  for (std::size_t f = 1; f < s.labels.size(); ++f) {
    const auto& prev = s.labels[f - 1].keypoint_left;
    const auto& cur = s.labels[f].keypoint_left;
    if (!prev || !cur) continue;
    const double disp = distance(*prev, *cur);
    if (disp > threshold) out.push_back({static_cast<int>(f), disp});
  }
  return out;
}

long AnnotationStore::sign_off(const std::string& video, const std::string& reviewer, bool approved,
                               std::optional<long> revision) {
  std::lock_guard lock(video_mutex(video));
  VideoState s = load_state(video);
  check_revision(s, revision);
  s.meta["reviews"].push_back({{"reviewer", reviewer}, {"approved", approved}, {"revision", s.revision()}});
  persist(video, s);
  return s.revision();
}

std::map<std::string, Session> AnnotationStore::load_sessions() const {
  std::map<std::string, Session> out;
  const fs::path file = root_ / kSessionsFile;
  if (!fs::exists(file)) return out;
  const json all = json::parse(read_file(file));
  for (const auto& [id, j] : all.items()) {
    out[id] = Session{id, j.at("video").get<std::string>(), j.value("annotator", ""), j.value("review_mode", false),
                      j.value("cursor", 0)};
  }
  return out;
}

void AnnotationStore::save_sessions(const std::map<std::string, Session>& sessions) const {
  json j = json::object();
  for (const auto& [id, s] : sessions)
    j[id] = {{"video", s.video}, {"annotator", s.annotator}, {"review_mode", s.review_mode}, {"cursor", s.cursor}};
  write_file_atomic(root_ / kSessionsFile, j.dump(2) + "\n");
}

Session AnnotationStore::open_session(const std::string& video, const std::string& annotator, bool review_mode) {
  (void)video_dir(video);
  std::lock_guard lock(session_mutex_);
  auto sessions = load_sessions();
  Session s{fmt::format("s{}", sessions.size() + 1), video, annotator, review_mode, 0};
  while (sessions.count(s.id)) s.id += "x";
  sessions[s.id] = s;
  save_sessions(sessions);
  return s;
}

Session AnnotationStore::session(const std::string& id) {
  std::lock_guard lock(session_mutex_);
  const auto sessions = load_sessions();
  auto it = sessions.find(id);
  if (it == sessions.end()) throw Error(ErrorCode::OutOfRange, "unknown session " + id);
  return it->second;
}

Session AnnotationStore::step(const std::string& id, int delta) {
  std::lock_guard lock(session_mutex_);
  auto sessions = load_sessions();
  auto it = sessions.find(id);
  if (it == sessions.end()) throw Error(ErrorCode::OutOfRange, "unknown session " + id);
  const int frames = static_cast<int>(load_state(it->second.video).labels.size());
  const int next = it->second.cursor + delta;
  if (next < 0 || next >= frames) throw Error(ErrorCode::OutOfRange, fmt::format("frame {} out of range", next));
  it->second.cursor = next;
  save_sessions(sessions);
  return it->second;
}

// ---------------------------------------------------------------------------
// HTTP

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfRange: return 404;
    case ErrorCode::ConcurrentEdit: return 409;
    case ErrorCode::NonPositiveDisparity:
    case ErrorCode::EpipolarViolation:
    case ErrorCode::MalformedLabel:
    case ErrorCode::CameraInsideSphere:
    case ErrorCode::InvalidAnchor: return 422;
    case ErrorCode::SchemaMismatch: return 400;
    default: return 500;
  }
}

struct AnnotationServer::Impl {
  AnnotationStore& store;
  httplib::Server server;

  explicit Impl(AnnotationStore& s) : store(s) {}
};

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::SchemaMismatch, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("invalid JSON body: ") + e.what());
  }
}

Keypoint2D keypoint_arg(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
    throw Error(ErrorCode::SchemaMismatch, std::string(key) + " must be [u, v]");
  return {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

std::optional<long> revision_arg(const json& body) {
  const auto it = body.find("revision");
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) throw Error(ErrorCode::SchemaMismatch, "revision must be an integer");
  return it->get<long>();
}

bool bool_arg(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_boolean()) throw Error(ErrorCode::SchemaMismatch, std::string(key) + " must be a boolean");
  return it->get<bool>();
}

template <typename F>
httplib::Server::Handler guarded(F&& f) {
  return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_json(res, {{"error", std::string(to_string(e.code()))}, {"message", e.what()}}, http_status(e.code()));
    } catch (const json::exception& e) {
      send_json(res, {{"error", "SchemaMismatch"}, {"message", e.what()}}, 400);
    } catch (const std::exception& e) {
      send_json(res, {{"error", "Internal"}, {"message", e.what()}}, 500);
    }
  };
}

std::string video_of(const httplib::Request& req) { return std::string(req.matches[1]) + "/" + std::string(req.matches[2]); }

}  // namespace

AnnotationServer::AnnotationServer(AnnotationStore& store) : impl_(std::make_unique<Impl>(store)) {
  auto& srv = impl_->server;
  AnnotationStore& st = store;
  const std::string video = R"(/api/videos/([^/]+)/([^/]+))";

  srv.Get("/api/videos", guarded([&st](const httplib::Request&, httplib::Response& res) { send_json(res, st.list_videos()); }));

  srv.Get(video + R"(/frames/(\d+))", guarded([&st](const httplib::Request& req, httplib::Response& res) {
            send_json(res, st.get_frame(video_of(req), std::stoi(req.matches[3])));
          }));

  srv.Get(video + R"(/frames/(\d+)/(left|right)\.png)", guarded([&st](const httplib::Request& req, httplib::Response& res) {
            const std::string v = video_of(req);
            const int index = std::stoi(req.matches[3]);
            const View view = req.matches[4] == "left" ? View::Left : View::Right;
            const std::string etag = fmt::format("\"{}/{}/{}\"", v, index, std::string(req.matches[4]));
            res.set_header("Cache-Control", "public, max-age=86400");
            res.set_header("ETag", etag);
            if (req.get_header_value("If-None-Match") == etag) {
              res.status = 304;
              return;
            }
            res.set_content(read_file(st.frame_image(v, index, view)), "image/png");
          }));

  srv.Put(video + R"(/frames/(\d+)/keypoints)", guarded([&st](const httplib::Request& req, httplib::Response& res) {
            const json body = parse_body(req);
            const KeypointResult r =
                st.put_keypoints(video_of(req), std::stoi(req.matches[3]), keypoint_arg(body, "kpt_left"),
                                 keypoint_arg(body, "kpt_right"), revision_arg(body), body.value("annotator", ""));
            send_json(res, {{"kpt_left", keypoint_json(r.keypoint_left)},
                            {"kpt_right", keypoint_json(r.keypoint_right)},
                            {"disparity_px", r.disparity_px},
                            {"point_mm", json::array({r.point.x_mm, r.point.y_mm, r.point.z_mm})},
                            {"bbox_left", to_json(r.bbox.left)},
                            {"bbox_right", to_json(r.bbox.right)},
                            {"revision", r.revision}});
          }));

  srv.Put(video + R"(/frames/(\d+)/flags)", guarded([&st](const httplib::Request& req, httplib::Response& res) {
            const json body = parse_body(req);
            const long rev = st.put_flags(video_of(req), std::stoi(req.matches[3]), bool_arg(body, "is_difficult"),
                                          bool_arg(body, "is_visible_in_both_stereo"), revision_arg(body),
                                          body.value("annotator", ""));
            send_json(res, {{"revision", rev}});
          }));

  srv.Get(video + R"(/review-diff)", guarded([&st](const httplib::Request& req, httplib::Response& res) {
            std::optional<double> threshold;
            if (req.has_param("threshold")) threshold = std::stod(req.get_param_value("threshold"));
            json frames = json::array();
            for (const auto& d : st.review_diff(video_of(req), threshold))
              frames.push_back({{"frame", d.frame}, {"displacement_px", d.displacement_px}});
            send_json(res, {{"threshold_px", threshold.value_or(st.options().drift_threshold_px)}, {"frames", frames}});
          }));

  srv.Put(video + R"(/review)", guarded([&st](const httplib::Request& req, httplib::Response& res) {
            const json body = parse_body(req);
            const long rev = st.sign_off(video_of(req), body.value("reviewer", ""), bool_arg(body, "approved"),
                                         revision_arg(body));
            send_json(res, {{"revision", rev}});
          }));

  const auto session_json = [](const Session& s) {
    return json{{"id", s.id}, {"video", s.video}, {"annotator", s.annotator}, {"review_mode", s.review_mode}, {"cursor", s.cursor}};
  };

  srv.Post("/api/sessions", guarded([&st, session_json](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             send_json(res, session_json(st.open_session(body.at("video").get<std::string>(), body.value("annotator", ""),
                                                         body.value("review_mode", false))),
                       201);
           }));

  srv.Get(R"(/api/sessions/([^/]+))", guarded([&st, session_json](const httplib::Request& req, httplib::Response& res) {
            send_json(res, session_json(st.session(req.matches[1])));
          }));

  srv.Post(R"(/api/sessions/([^/]+)/step)", guarded([&st, session_json](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             send_json(res, session_json(st.step(req.matches[1], body.value("delta", 1))));
           }));

  if (!store.options().static_dir.empty()) srv.set_mount_point("/", store.options().static_dir.string());
}

AnnotationServer::~AnnotationServer() { stop(); }

bool AnnotationServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int AnnotationServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool AnnotationServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void AnnotationServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace sbench
