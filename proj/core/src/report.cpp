#include "sbench/report.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sbench/dataset.hpp"
#include "sbench/error.hpp"

namespace sbench {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<RankingEntry> rank_trackers(std::span<const MetricsReport> reports) {
  std::vector<RankingEntry> out;
  for (const auto& r : reports) out.push_back({0, r.tracker, r.subset.eao});
  std::stable_sort(out.begin(), out.end(), [](const RankingEntry& a, const RankingEntry& b) {
    if (a.eao.has_value() != b.eao.has_value()) return a.eao.has_value();
    if (a.eao && *a.eao != *b.eao) return *a.eao > *b.eao;
    return a.tracker < b.tracker;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
  return out;
}

std::string format_mean_std(const std::optional<double>& mean, const std::optional<double>& sd, int precision) {
  if (!mean) return "-";
  if (!sd) return fmt::format("{:.{}f}", *mean, precision);
  return fmt::format("{:.{}f} ± {:.{}f}", *mean, precision, *sd, precision);
}

namespace {

std::string fixed(const std::optional<double>& v, int precision = 3) {
  return v ? fmt::format("{:.{}f}", *v, precision) : "-";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void table_row(std::ostringstream& os, const std::string& tracker, const std::string& scope, const MetricSummary& s) {
  os << csv_field(tracker) << ',' << csv_field(scope) << ',' << fixed(s.robustness2d) << ',' << fixed(s.accuracy)
     << ',' << format_mean_std(s.error2d_px, s.error2d_std_px) << ',' << fixed(s.robustness3d) << ','
     << format_mean_std(s.error3d_mm, s.error3d_std_mm) << ',' << fixed(s.eao) << '\n';
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// --- minimal SVG rendering ---------------------------------------------------

constexpr double kW = 640, kH = 400, kMargin = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string svg_header(const std::string& title, const std::string& xlabel, const std::string& ylabel) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{3}</text>\n"
      "<line x1=\"{4}\" y1=\"{5}\" x2=\"{6}\" y2=\"{5}\" stroke=\"black\"/>\n"
      "<line x1=\"{4}\" y1=\"{4}\" x2=\"{4}\" y2=\"{5}\" stroke=\"black\"/>\n"
      "<text x=\"{2}\" y=\"{7}\" text-anchor=\"middle\">{8}</text>\n"
      "<text x=\"15\" y=\"{9}\" text-anchor=\"middle\" transform=\"rotate(-90 15 {9})\">{10}</text>\n",
      kW, kH, kW / 2, title, kMargin, kH - kMargin, kW - kMargin, kH - 12, xlabel, kH / 2, ylabel);
}

double sx(double t) { return kMargin + t * (kW - 2 * kMargin); }
double sy(double t) { return kH - kMargin - t * (kH - 2 * kMargin); }

std::string eao_curve_svg(std::span<const MetricsReport> reports) {
  std::size_t length = 1;
  for (const auto& r : reports) length = std::max(length, r.subset_sequence.size());
  std::string svg = svg_header("Merged overlap per frame", "frame after anchor", "IoU");
  if (!reports.empty() && reports.front().window) {
    const auto& w = *reports.front().window;
    const double x0 = sx((w.n_min - 1) / double(length)), x1 = sx((w.n_max - 1) / double(length));
    svg += fmt::format("<rect x=\"{:.2f}\" y=\"{}\" width=\"{:.2f}\" height=\"{}\" fill=\"#eeeeee\"/>\n", x0, kMargin,
                       x1 - x0, kH - 2 * kMargin);
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::string pts;
    const auto& e = reports[i].subset_sequence.entries;
    for (std::size_t t = 0; t < e.size(); ++t) {
      if (!e[t]) continue;
      pts += fmt::format("{:.2f},{:.2f} ", sx(t / double(length)), sy(*e[t]));
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" points=\"{}\"/>\n", kPalette[i % 10], pts);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", kW - kMargin - 150, kMargin + 15 * (i + 1),
                       kPalette[i % 10], reports[i].tracker);
  }
  return svg + "</svg>\n";
}

std::string ranking_svg(const std::vector<RankingEntry>& ranking) {
  std::string svg = svg_header("EAO vs. rank", "rank", "EAO");
  const double n = std::max<std::size_t>(1, ranking.size());
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (!ranking[i].eao) continue;
    const double x = sx((i + 0.5) / n);
    const double y = sy(*ranking[i].eao);
    svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\" fill=\"{}\"/>\n", x, y, kPalette[i % 10]);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", x, y - 10, ranking[i].tracker);
  }
  return svg + "</svg>\n";
}

std::string ar_svg(std::span<const MetricsReport> reports) {
  std::string svg = svg_header("Accuracy-robustness", "robustness (2D)", "accuracy");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& s = reports[i].subset;
    if (!s.accuracy || !s.robustness2d) continue;
    const double x = sx(*s.robustness2d);
    const double y = sy(*s.accuracy);
    svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\" fill=\"{}\"/>\n", x, y, kPalette[i % 10]);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", x + 8, y - 8, reports[i].tracker);
  }
  return svg + "</svg>\n";
}

}  // namespace

void emit_report(std::span<const MetricsReport> input, const fs::path& out_dir, const ReportOptions& options) {
  // Tables list trackers by name so they do not depend on evaluation order.
  std::vector<MetricsReport> sorted(input.begin(), input.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.tracker < b.tracker; });
  const std::span<const MetricsReport> reports = sorted;
  if (reports.empty()) throw Error(ErrorCode::EmptyInput, "no tracker reports to emit");
  fs::create_directories(out_dir);
  const auto ranking = rank_trackers(reports);

  json summary;
  summary["trackers"] = json::array();
  for (const auto& r : reports) summary["trackers"].push_back(to_json(r));
  summary["ranking"] = json::array();
  for (const auto& e : ranking) summary["ranking"].push_back({{"rank", e.rank}, {"tracker", e.tracker}, {"eao", opt(e.eao)}});
  write_file_atomic(out_dir / "summary.json", summary.dump(2) + "\n");

  std::ostringstream cases;
  cases << "tracker,case,Rob2D,Acc2D,Err2D,Rob3D,Err3D,EAO\n";
  for (const auto& r : reports) {
    for (const auto& c : r.cases) table_row(cases, r.tracker, c.id, c.summary);
    table_row(cases, r.tracker, "ALL", r.subset);
  }
  write_file_atomic(out_dir / "cases.csv", cases.str());

  std::ostringstream curve;
  std::size_t length = 0;
  for (const auto& r : reports) length = std::max(length, r.subset_sequence.size());
  curve << "frame,in_window";
  for (const auto& r : reports) curve << ',' << csv_field(r.tracker);
  curve << '\n';
  const auto& window = reports.front().window;
  for (std::size_t t = 0; t < length; ++t) {
    const int frame = static_cast<int>(t) + 1;
    curve << frame << ',' << (window && frame >= window->n_min && frame <= window->n_max ? 1 : 0);
    for (const auto& r : reports) {
      curve << ',';
      if (t >= r.subset_sequence.size()) continue;
      const auto& e = r.subset_sequence.entries[t];
      curve << (e ? fmt::format("{}", *e) : std::string("ignore"));
    }
    curve << '\n';
  }
  write_file_atomic(out_dir / "eao_curve.csv", curve.str());

  std::ostringstream rank;
  rank << "rank,tracker,EAO\n";
  for (const auto& e : ranking) rank << e.rank << ',' << csv_field(e.tracker) << ',' << fixed(e.eao) << '\n';
  write_file_atomic(out_dir / "ranking.csv", rank.str());

  std::ostringstream ar;
  ar << "tracker,accuracy,robustness2d,robustness3d\n";
  for (const auto& r : reports)
    ar << csv_field(r.tracker) << ',' << fixed(r.subset.accuracy) << ',' << fixed(r.subset.robustness2d) << ','
       << fixed(r.subset.robustness3d) << '\n';
  write_file_atomic(out_dir / "ar_plot.csv", ar.str());

  if (options.svg) {
    write_file_atomic(out_dir / "eao_curve.svg", eao_curve_svg(reports));
    write_file_atomic(out_dir / "ranking.svg", ranking_svg(ranking));
    write_file_atomic(out_dir / "ar_plot.svg", ar_svg(reports));
  }
}

}  // namespace sbench
