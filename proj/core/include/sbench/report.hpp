#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbench/scoring.hpp"

namespace sbench {

struct RankingEntry {
  int rank = 0;
  std::string tracker;
  std::optional<double> eao;
};

/// Sorted by EAO descending; ties (and undefined EAO, placed last) break by
/// tracker name.
std::vector<RankingEntry> rank_trackers(std::span<const MetricsReport> reports);

/// "5.3 ± 2.4"; "-" when the mean is undefined.
std::string format_mean_std(const std::optional<double>& mean, const std::optional<double>& std, int precision = 1);

struct ReportOptions {
  bool svg = false;
};

/// Writes summary.json, cases.csv, eao_curve.csv, ranking.csv, ar_plot.csv
/// and, with `svg`, eao_curve.svg, ranking.svg and ar_plot.svg.
/// Trackers appear in name order.
void emit_report(std::span<const MetricsReport> reports, const std::filesystem::path& out_dir,
                 const ReportOptions& options = {});

}  // namespace sbench
