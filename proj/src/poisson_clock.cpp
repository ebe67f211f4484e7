#include "ccpdmp/poisson_clock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ccpdmp/errors.hpp"

namespace ccpdmp {

namespace {

// Start of the part of [0, len] where a + b s > 0, or len when there is none.
double positive_start(double a, double b, double len) {
  if (a > 0.0) return 0.0;
  if (b > 0.0) return std::min(len, -a / b);
  return len;
}

// Solve r0 d + b d^2 / 2 = e for the smallest d >= 0, given that a root exists
// before the rate crosses zero (b < 0) or the segment ends.
double invert_quadratic(double r0, double b, double e, double d_max) {
  if (b == 0.0) return e / r0;
  const double disc = r0 * r0 + 2.0 * b * e;
  if (disc > 1e-12) return 2.0 * e / (r0 + std::sqrt(disc));
  // Near tangency the closed form loses accuracy; bisect on the integral.
  if (b < 0.0) d_max = std::min(d_max, -r0 / b);
  double lo = 0.0;
  double hi = d_max;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (r0 * mid + 0.5 * b * mid * mid < e ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double positive_part_integral(double a, double b, double len) {
  if (len <= 0.0) return 0.0;
  if (b == 0.0) return a > 0.0 ? a * len : 0.0;
  const double s0 = positive_start(a, b, len);
  if (s0 >= len) return 0.0;
  const double r0 = a + b * s0;
  double s1 = len;
  if (b < 0.0) s1 = std::min(len, s0 + r0 / -b);  // zero crossing
  if (std::isinf(s1)) return kInfinity;
  const double d = s1 - s0;
  return std::max(0.0, r0 * d + 0.5 * b * d * d);
}

PiecewiseLinearRate::PiecewiseLinearRate(std::vector<LinearSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw DomainError("piecewise-linear rate needs at least one segment");
  if (segments_.front().t_start != 0.0) throw DomainError("piecewise-linear rate must start at 0");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    auto& s = segments_[i];
    if (!(s.t_end > s.t_start)) {
      throw DomainError("segment " + std::to_string(i) + " has t_end <= t_start");
    }
    if (!std::isfinite(s.a) || !std::isfinite(s.b)) {
      throw DomainError("segment " + std::to_string(i) + " has non-finite coefficients");
    }
    if (std::isinf(s.t_end) && i + 1 != segments_.size()) {
      throw DomainError("only the last segment may be unbounded");
    }
    if (i > 0) {
      const double prev_end = segments_[i - 1].t_end;
      if (std::abs(prev_end - s.t_start) > 1e-12 * std::max(1.0, std::abs(prev_end))) {
        throw DomainError("segments are not contiguous at index " + std::to_string(i));
      }
      s.t_start = prev_end;
    }
  }
}

double PiecewiseLinearRate::value(double t) const {
  if (!(t >= 0.0) || t > horizon()) throw DomainError("time outside rate domain");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double x, const LinearSegment& s) { return x < s.t_end; });
  if (it == segments_.end()) --it;
  return it->value(t);
}

double integrated_rate(const PiecewiseLinearRate& rate, double t) {
  if (!(t >= 0.0) || t > rate.horizon()) throw DomainError("integrated_rate: t outside [0, horizon]");
  double total = 0.0;
  for (const auto& s : rate.segments()) {
    if (t <= s.t_start) break;
    total += positive_part_integral(s.a, s.b, std::min(t, s.t_end) - s.t_start);
  }
  return total;
}

ClockOutcome first_arrival(const PiecewiseLinearRate& rate, double exp_draw) {
  if (!(exp_draw >= 0.0)) throw DomainError("first_arrival: exponential draw must be >= 0");
  double e = exp_draw;
  for (const auto& s : rate.segments()) {
    const double len = s.length();
    const double mass = positive_part_integral(s.a, s.b, len);
    if (mass > e) {
      const double s0 = positive_start(s.a, s.b, len);
      const double r0 = std::max(0.0, s.a + s.b * s0);
      const double d = invert_quadratic(r0, s.b, e, len - s0);
      double tau = s.t_start + s0 + d;
      if (tau >= s.t_end) tau = std::nextafter(s.t_end, s.t_start);
      return ClockOutcome::event(tau);
    }
    e -= mass;
  }
  return ClockOutcome::no_event(rate.horizon());
}

ClockOutcome first_arrival(const PiecewiseLinearRate& rate, Rng& rng) {
  return first_arrival(rate, rng.exponential());
}

ClockOutcome superposition_first_arrival(std::span<const ClockOutcome> arrivals) {
  if (arrivals.empty()) throw DomainError("superposition of an empty set of clocks");
  const ClockOutcome* best = nullptr;
  for (const auto& a : arrivals) {
    if (a.is_event() && (best == nullptr || a.time < best->time)) best = &a;
  }
  if (best != nullptr) return *best;
  return ClockOutcome::no_event(arrivals.front().time);
}

double EnvelopeTolerance::allowance(double target) const {
  return absolute + relative * std::abs(target);
}

double acceptance_ratio(double target, double proposal, const EnvelopeTolerance& tol) {
  if (!(proposal > 0.0)) throw InvalidProposalError("thinning proposal value must be positive");
  const double positive = std::max(0.0, target);
  if (positive <= proposal) return positive / proposal;
  if (positive - proposal > tol.allowance(target)) {
    throw EnvelopeViolationError("target rate " + std::to_string(target) +
                                 " exceeds envelope " + std::to_string(proposal));
  }
  return 1.0;
}

bool thinning_accept(double target, double proposal, double unif_draw,
                     const EnvelopeTolerance& tol) {
  return unif_draw <= acceptance_ratio(target, proposal, tol);
}

}  // namespace ccpdmp
