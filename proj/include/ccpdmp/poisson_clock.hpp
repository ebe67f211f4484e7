#pragma once

#include <limits>
#include <span>
#include <vector>

#include "ccpdmp/random.hpp"

namespace ccpdmp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// One linear piece r(t) = a + b (t - t_start) on [t_start, t_end).
/// The last piece of a rate may have t_end = +inf.
struct LinearSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double a = 0.0;
  double b = 0.0;

  double length() const { return t_end - t_start; }
  double value(double t) const { return a + b * (t - t_start); }
  double value_at_end() const { return a + b * length(); }
};

/// Integral over s in [0, len] of max{0, a + b s}; len may be +inf.
double positive_part_integral(double a, double b, double len);

/// Contiguous piecewise-linear intensity starting at time 0.
class PiecewiseLinearRate {
 public:
  PiecewiseLinearRate() = default;
  explicit PiecewiseLinearRate(std::vector<LinearSegment> segments);

  const std::vector<LinearSegment>& segments() const { return segments_; }
  double horizon() const { return segments_.empty() ? 0.0 : segments_.back().t_end; }

  /// Value of the linear function (not clipped at zero); t must lie in [0, horizon].
  double value(double t) const;

 private:
  std::vector<LinearSegment> segments_;
};

/// Either an event at `time`, or no event before the horizon (`time` = horizon).
struct ClockOutcome {
  enum class Kind { Event, NoEvent };
  Kind kind = Kind::NoEvent;
  double time = 0.0;

  static ClockOutcome event(double tau) { return {Kind::Event, tau}; }
  static ClockOutcome no_event(double horizon) { return {Kind::NoEvent, horizon}; }
  bool is_event() const { return kind == Kind::Event; }

  friend bool operator==(const ClockOutcome&, const ClockOutcome&) = default;
};

/// Lambda(t) = int_0^t max{0, l(s)} ds, closed form per segment.
double integrated_rate(const PiecewiseLinearRate& rate, double t);

/// First arrival with Lambda(tau) = exp_draw, or NoEvent(horizon).
ClockOutcome first_arrival(const PiecewiseLinearRate& rate, double exp_draw);

/// Same, drawing E = -log(u) from `rng`.
ClockOutcome first_arrival(const PiecewiseLinearRate& rate, Rng& rng);

/// Minimum of independent first arrivals; ties go to the lowest index.
ClockOutcome superposition_first_arrival(std::span<const ClockOutcome> arrivals);

/// Tolerance used when comparing a target rate against its dominating rate.
struct EnvelopeTolerance {
  double absolute = 1e-8;
  double relative = 1e-10;

  double allowance(double target) const;
};

/// max{0, target}/proposal, clamped to 1 within tolerance.
/// Throws InvalidProposalError for proposal <= 0 and EnvelopeViolationError
/// when the target exceeds the proposal by more than the tolerance.
double acceptance_ratio(double target, double proposal, const EnvelopeTolerance& tol = {});

/// Thinning decision: unif_draw <= max{0, target}/proposal.
bool thinning_accept(double target, double proposal, double unif_draw,
                     const EnvelopeTolerance& tol = {});

}  // namespace ccpdmp
