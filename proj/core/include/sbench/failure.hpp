#pragma once

#include <cstddef>
#include <optional>

namespace sbench {

/// A completed run of `streak` consecutive bad frames.
/// Indices refer to positions in the per-frame outcome sequence.
struct FailureEvent {
  std::size_t streak_start = 0;  // first bad frame of the streak
  std::size_t trigger = 0;       // the streak-th bad frame

  friend bool operator==(const FailureEvent&, const FailureEvent&) = default;
};

/// Scans frames [0, n). Ignored frames neither extend nor reset the streak;
/// any other frame that is not bad resets it.
template <typename IsIgnored, typename IsBad>
std::optional<FailureEvent> detect_streak(std::size_t n, int streak, IsIgnored is_ignored, IsBad is_bad) {
  int run = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_ignored(i)) continue;
    if (!is_bad(i)) {
      run = 0;
      continue;
    }
    if (run == 0) start = i;
    if (++run >= streak) return FailureEvent{start, i};
  }
  return std::nullopt;
}

}  // namespace sbench
