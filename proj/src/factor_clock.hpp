#pragma once

#include <optional>
#include <span>
#include <string>

#include "ccpdmp/cc_envelope.hpp"
#include "ccpdmp/errors.hpp"
#include "ccpdmp/samplers.hpp"

namespace ccpdmp::detail {

/// Pending proposal of one rate: a CC thinning run started at `start`.
struct FactorClock {
  enum class Pending { Proposal, Expiry, Idle };

  std::optional<AdaptiveThinning> thinning;
  double start = 0.0;    // absolute time of the decomposition's t = 0
  double restart = 0.0;  // last time the rate was invalidated
  double next = kInfinity;
  Pending pending = Pending::Idle;
  std::size_t banked_evaluations = 0;

  std::size_t evaluations() const {
    return banked_evaluations + (thinning ? thinning->rate_evaluations() : 0);
  }

  void retire() {
    if (thinning) banked_evaluations += thinning->rate_evaluations();
    thinning.reset();
  }

  void build(CCFunction cc, double now, const EnvelopeTolerance& tol, Rng& rng) {
    retire();
    start = now;
    thinning.emplace(std::move(cc), tol);
    propose(rng);
  }

  void go_idle(double now) {
    retire();
    start = now;
    next = kInfinity;
    pending = Pending::Idle;
  }

  void propose(Rng& rng) {
    const ClockOutcome outcome = thinning->propose(rng);
    if (outcome.is_event()) {
      next = start + outcome.time;
      pending = Pending::Proposal;
    } else if (std::isfinite(outcome.time)) {
      next = start + outcome.time;
      pending = Pending::Expiry;
    } else {
      next = kInfinity;
      pending = Pending::Idle;
    }
  }

  /// Thinning test at the pending proposal; draws the next proposal on rejection.
  bool test(Rng& rng, std::size_t max_iters) {
    if (thinning->accept_or_refine(next - start, rng)) return true;
    if (thinning->rejections() >= max_iters) {
      throw ThinningStallError("thinning stalled after " + std::to_string(max_iters) +
                               " rejections; final " + thinning->envelope().describe());
    }
    propose(rng);
    return false;
  }
};

/// Time until the first bounded coordinate in `coords` reaches its bound.
inline double boundary_cap(const VectorXd& theta, const VectorXd& v, std::span<const Index> coords,
                           const std::vector<std::optional<double>>& bounds) {
  double cap = kInfinity;
  for (Index k : coords) {
    const auto& lb = bounds[static_cast<std::size_t>(k)];
    if (!lb || !(v(k) < 0.0)) continue;
    cap = std::min(cap, std::max(0.0, theta(k) - *lb) / -v(k));
  }
  return cap;
}

/// Horizons shorter than this relative to tau_max leave a factor idle until
/// the boundary event re-simulates it.
inline constexpr double kMinHorizonFraction = 1e-9;
inline constexpr double kBoundaryShrink = 1.0 - 1e-9;
/// While the bound is farther than this (relative to tau_max), a window stops
/// halfway to it. Rates that blow up at the bound then keep finite chords, at
/// the price of about log2(distance / floor) expiries on the way in.
inline constexpr double kHalvingFloor = 1e-6;

/// Returns the horizon to use, or 0 when the factor must idle.
inline double capped_horizon(double tau_max, double cap) {
  const double scale = std::max(1.0, tau_max);
  double h = std::min(tau_max, cap * kBoundaryShrink);
  if (0.5 * cap > kHalvingFloor * scale) h = std::min(h, 0.5 * cap);
  if (h < kMinHorizonFraction * scale) return 0.0;
  return h;
}

inline void check_initial_state(const Model& model, const PDMPState& state) {
  const Index p = model.dimension();
  if (state.theta.size() != p) throw DomainError("initial state: theta has the wrong dimension");
  if (state.v.size() != p) throw DomainError("initial state: v has the wrong dimension");
  if (!state.theta.allFinite() || !state.v.allFinite() || !std::isfinite(state.t))
    throw DomainError("initial state: non-finite entries");
  for (Index k = 0; k < p; ++k) {
    const auto lb = model.lower_bound(k);
    if (lb && !(state.theta(k) > *lb))
      throw DomainError("initial state: coordinate " + std::to_string(k) +
                        " is not strictly inside its bound");
  }
}

}  // namespace ccpdmp::detail
