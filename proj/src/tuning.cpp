#include "ccpdmp/tuning.hpp"

#include <algorithm>
#include <cmath>

#include "ccpdmp/errors.hpp"

namespace ccpdmp {

AdaptiveHorizon::AdaptiveHorizon(double initial, double q, std::size_t window, bool adaptive)
    : current_(initial), q_(q), window_(window), adaptive_(adaptive) {
  if (!(initial > 0.0) || !std::isfinite(initial))
    throw DomainError("horizon: tau_max must be positive and finite");
  if (!(q > 0.0 && q <= 100.0)) throw DomainError("horizon: percentile must lie in (0, 100]");
  if (window < 1) throw DomainError("horizon: window must be >= 1");
  if (adaptive_) buffer_.reserve(window);
}

bool AdaptiveHorizon::update(double duration) {
  if (!(duration > 0.0)) throw DomainError("horizon: duration must be positive");
  if (!adaptive_) return false;
  if (buffer_.size() < window_) {
    buffer_.push_back(duration);
  } else {
    buffer_[next_] = duration;
    next_ = (next_ + 1) % window_;
  }
  if (++since_update_ < window_) return false;
  since_update_ = 0;
  const double next = nearest_rank_percentile(buffer_, q_);
  const bool changed = next != current_;
  current_ = next;
  return changed;
}

double nearest_rank_percentile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("percentile: no values");
  if (!(q > 0.0 && q <= 100.0)) throw DomainError("percentile: q must lie in (0, 100]");
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(q / 100.0 * static_cast<double>(values.size()) - 1e-9);
  const std::size_t idx = static_cast<std::size_t>(std::max(1.0, rank)) - 1;
  return values[std::min(idx, values.size() - 1)];
}

double efficiency(const EfficiencyCounter& counter) {
  const std::size_t total = counter.events + counter.shadow_events;
  if (total == 0) throw DomainError("efficiency: no iterations recorded");
  return static_cast<double>(counter.events) / static_cast<double>(total);
}

}  // namespace ccpdmp
