#include "sbench/eao.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sbench/error.hpp"

namespace sbench {

ScoreSequence anchor_sequence(std::span<const FrameOutcome2D> outcomes, const std::optional<FailureEvent>& failure) {
  ScoreSequence seq;
  seq.entries.reserve(outcomes.size());
  const std::size_t zero_from = failure ? failure->streak_start : outcomes.size();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const FrameOutcome2D& o = outcomes[i];
    if (i >= zero_from) {
      seq.entries.emplace_back(0.0);
    } else if (o.status == FrameStatus::Valid) {
      seq.entries.emplace_back(o.iou->combined);
    } else if (o.status == FrameStatus::NoPredictionVisible) {
      seq.entries.emplace_back(0.0);
    } else {
      seq.entries.emplace_back(std::nullopt);
    }
  }
  return seq;
}

ScoreSequence merge_sequences(std::span<const ScoreSequence> sequences) {
  if (sequences.empty()) throw Error(ErrorCode::EmptyInput, "nothing to merge");
  std::size_t length = 0;
  for (const auto& s : sequences) length = std::max(length, s.size());
  ScoreSequence out;
  out.entries.resize(length);
  for (std::size_t t = 0; t < length; ++t) {
    double sum = 0.0;
    int count = 0;
    for (const auto& s : sequences) {
      if (t >= s.size() || !s.entries[t]) continue;
      sum += *s.entries[t];
      ++count;
    }
    if (count > 0) out.entries[t] = sum / count;
  }
  return out;
}

EaoWindow eao_window(std::span<const int> lengths) {
  if (lengths.size() < 2) throw Error(ErrorCode::TooFewVideos, "the EAO window needs at least two videos");
  const double n = static_cast<double>(lengths.size());
  const double mean = std::accumulate(lengths.begin(), lengths.end(), 0.0) / n;
  double var = 0.0;
  for (int l : lengths) var += (l - mean) * (l - mean);
  const double sd = std::sqrt(var / n);
  const int longest = std::max(1, *std::max_element(lengths.begin(), lengths.end()));

  EaoWindow w;
  w.n_min = std::max(1, static_cast<int>(std::lround(mean - sd)));
  w.n_max = std::min(longest, static_cast<int>(std::lround(mean + sd)));
  if (w.n_max <= w.n_min) {
    if (w.n_max > 1) {
      w.n_min = w.n_max - 1;
    } else {
      w.n_min = 1;
      w.n_max = 2;
    }
  }
  return w;
}

double eao(const ScoreSequence& sequence, const EaoWindow& window, bool literal_denominator) {
  double sum = 0.0;
  int count = 0;
  for (int i = window.n_min; i <= window.n_max; ++i) {
    const auto idx = static_cast<std::size_t>(i - 1);
    if (idx < sequence.size()) {
      if (!sequence.entries[idx]) continue;
      sum += *sequence.entries[idx];
    }
    ++count;
  }
  if (literal_denominator) return sum / (window.n_max - window.n_min);
  if (count == 0) throw Error(ErrorCode::EmptyWindow, "every entry in the EAO window is ignore");
  return sum / count;
}

double weighted_average(std::span<const double> values, std::span<const double> weights) {
  if (values.empty() || values.size() != weights.size())
    throw Error(ErrorCode::EmptyInput, "weighted average needs one weight per value");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] < 0.0) throw Error(ErrorCode::AllZeroWeights, "weights must be non-negative");
    num += values[i] * weights[i];
    den += weights[i];
  }
  if (!(den > 0.0)) throw Error(ErrorCode::AllZeroWeights, "all weights are zero");
  return num / den;
}

std::optional<double> weighted_average(std::span<const std::optional<double>> values,
                                       std::span<const double> weights) {
  std::vector<double> v;
  std::vector<double> w;
  for (std::size_t i = 0; i < values.size() && i < weights.size(); ++i) {
    if (!values[i] || !(weights[i] > 0.0)) continue;
    v.push_back(*values[i]);
    w.push_back(weights[i]);
  }
  if (v.empty()) return std::nullopt;
  return weighted_average(v, w);
}

std::optional<double> weighted_stddev(std::span<const std::optional<double>> values,
                                      std::span<const double> weights) {
  const auto mean = weighted_average(values, weights);
  if (!mean) return std::nullopt;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size() && i < weights.size(); ++i) {
    if (!values[i] || !(weights[i] > 0.0)) continue;
    num += weights[i] * (*values[i] - *mean) * (*values[i] - *mean);
    den += weights[i];
  }
  return std::sqrt(num / den);
}

}  // namespace sbench
