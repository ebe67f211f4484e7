#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ccpdmp {

using Eigen::Index;
using Eigen::VectorXd;

enum class EventKind : std::uint8_t { Initial, Event, Refresh, Boundary };

struct SkeletonCounters {
  std::size_t events = 0;          ///< accepted thinning proposals
  std::size_t shadow_events = 0;   ///< rejections plus horizon expiries
  std::size_t rate_evaluations = 0;
  std::size_t refreshes = 0;
  std::size_t boundary_hits = 0;
  std::size_t resimulations = 0;   ///< factor clocks rebuilt after another factor's event
  std::size_t degenerate_reflections = 0;
};

struct FactorCounters {
  std::size_t events = 0;
  std::size_t shadow_events = 0;
};

/// Event records (t_k, theta_k, v_k) for a chosen subset of coordinates.
class Skeleton {
 public:
  Skeleton() = default;
  /// `recorded` empty means every coordinate.
  Skeleton(Index dimension, std::vector<Index> recorded);

  void push(double t, const VectorXd& theta, const VectorXd& v, EventKind kind);
  /// Append values already restricted to the recorded coordinates.
  void push_recorded(double t, const double* theta, const double* v, EventKind kind);

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  Index dimension() const { return dim_; }
  Index width() const { return static_cast<Index>(recorded_.size()); }
  const std::vector<Index>& recorded() const { return recorded_; }

  double time(std::size_t i) const { return times_[i]; }
  EventKind kind(std::size_t i) const { return kinds_[i]; }
  Eigen::Map<const VectorXd> position(std::size_t i) const {
    return Eigen::Map<const VectorXd>(theta_.data() + i * recorded_.size(), width());
  }
  Eigen::Map<const VectorXd> velocity(std::size_t i) const {
    return Eigen::Map<const VectorXd>(v_.data() + i * recorded_.size(), width());
  }
  /// Position of recorded coordinate j at time t, by the linear flow.
  double position_at(double t, Index j) const;

  double duration() const { return empty() ? 0.0 : times_.back() - times_.front(); }

  SkeletonCounters counters;
  std::vector<FactorCounters> per_factor;
  std::vector<double> horizons_used;  ///< tau_max after each adaptation (first entry: initial)
  std::vector<std::string> warnings;

 private:
  Index dim_ = 0;
  std::vector<Index> recorded_;
  std::vector<double> times_;
  std::vector<double> theta_;
  std::vector<double> v_;
  std::vector<EventKind> kinds_;
};

}  // namespace ccpdmp
