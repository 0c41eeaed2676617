#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sbench/failure.hpp"
#include "sbench/metrics2d.hpp"

namespace sbench {

/// One per-frame overlap entry; std::nullopt marks an "ignore" frame.
using Score = std::optional<double>;

/// Per-frame overlap sequence, position 0 being the first frame after the
/// anchor (window bounds address it 1-based).
struct ScoreSequence {
  std::vector<Score> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  friend bool operator==(const ScoreSequence&, const ScoreSequence&) = default;
};

/// Inclusive, 1-based [n_min, n_max].
struct EaoWindow {
  int n_min = 1;
  int n_max = 2;

  friend bool operator==(const EaoWindow&, const EaoWindow&) = default;
};

/// Ignore on invalid gt frames, combined IoU (0 without a box) elsewhere,
/// and 0 everywhere from the first frame of the failure streak onward.
ScoreSequence anchor_sequence(std::span<const FrameOutcome2D> outcomes, const std::optional<FailureEvent>& failure);

/// Frame-wise mean over the non-ignore entries of all sequences that reach
/// a frame; ignore only where every contributing entry is ignore. The result
/// is as long as the longest input. Throws EmptyInput on no input.
ScoreSequence merge_sequences(std::span<const ScoreSequence> sequences);

/// Anchor runs of one video into the video sequence.
inline ScoreSequence merge_anchor_sequences(std::span<const ScoreSequence> s) { return merge_sequences(s); }
/// Video sequences (one per video) into the subset sequence.
inline ScoreSequence merge_video_sequences(std::span<const ScoreSequence> s) { return merge_sequences(s); }

/// mean -/+ population std of the video sequence lengths, rounded to the
/// nearest frame, n_min clamped to >= 1 and n_max to the longest length.
/// Collapsed windows are widened to two frames. Throws TooFewVideos for
/// fewer than two lengths.
EaoWindow eao_window(std::span<const int> video_lengths);

/// Mean of the non-ignore entries inside the window; positions past the end
/// of the sequence count as 0. With `literal_denominator` the sum is divided
/// by (n_max - n_min) instead. Throws EmptyWindow when every entry is ignore.
double eao(const ScoreSequence& sequence, const EaoWindow& window, bool literal_denominator = false);

/// sum(v_i w_i) / sum(w_i). Throws AllZeroWeights (or EmptyInput on size
/// mismatch / no values).
double weighted_average(std::span<const double> values, std::span<const double> weights);

/// As above, but undefined values carry no weight; returns nullopt when no
/// defined value has positive weight.
std::optional<double> weighted_average(std::span<const std::optional<double>> values,
                                       std::span<const double> weights);

/// Frame-weighted standard deviation of defined values (population form).
std::optional<double> weighted_stddev(std::span<const std::optional<double>> values,
                                      std::span<const double> weights);

}  // namespace sbench
