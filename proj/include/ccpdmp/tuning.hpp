#pragma once

#include <cstddef>
#include <vector>

namespace ccpdmp {

/// tau_max set to the nearest-rank q-th percentile of recent inter-event
/// durations, recomputed every `window` pushes.
class AdaptiveHorizon {
 public:
  AdaptiveHorizon(double initial = 1.0, double q = 80.0, std::size_t window = 100,
                  bool adaptive = true);

  static AdaptiveHorizon fixed(double tau_max) { return AdaptiveHorizon(tau_max, 80.0, 100, false); }

  /// Returns true when tau_max changed.
  bool update(double duration);
  double current() const { return current_; }
  bool adaptive() const { return adaptive_; }
  std::size_t buffered() const { return buffer_.size(); }
  double percentile() const { return q_; }
  std::size_t window() const { return window_; }

 private:
  double current_;
  double q_;
  std::size_t window_;
  bool adaptive_;
  std::vector<double> buffer_;
  std::size_t next_ = 0;
  std::size_t since_update_ = 0;
};

/// Nearest-rank q-th percentile (q in (0, 100]).
double nearest_rank_percentile(std::vector<double> values, double q);

struct EfficiencyCounter {
  std::size_t events = 0;
  std::size_t shadow_events = 0;
};

/// events / (events + shadow_events).
double efficiency(const EfficiencyCounter& counter);

}  // namespace ccpdmp
