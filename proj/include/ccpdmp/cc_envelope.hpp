#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ccpdmp/poisson_clock.hpp"
#include "ccpdmp/random.hpp"

namespace ccpdmp {

using ScalarFunction = std::function<double(double)>;

/// Concave-convex decomposition f = f_u + f_n of a rate argument on [0, horizon).
///
/// `eval_target`, when set, is the exact rate argument and f_u + f_n is only an
/// upper bound of it (e.g. a Taylor polynomial bound). Thinning then accepts
/// against the target while the envelope is built from the bound.
///
/// `affine_exact` marks decompositions whose parts are both affine and exact
/// for all t >= 0; such envelopes are extended to an unbounded horizon.
struct CCFunction {
  ScalarFunction eval_convex;
  ScalarFunction eval_concave;
  ScalarFunction eval_concave_deriv;
  double horizon = 1.0;
  ScalarFunction eval_target;
  bool affine_exact = false;

  double convex(double t) const { return eval_convex(t); }
  double concave(double t) const { return eval_concave(t); }
  double concave_deriv(double t) const { return eval_concave_deriv(t); }
  double bound(double t) const { return convex(t) + concave(t); }
  double target(double t) const { return eval_target ? eval_target(t) : bound(t); }
};

/// The zero function on [0, horizon), affine and exact.
CCFunction zero_cc(double horizon);

/// Cached evaluation of a decomposition at one abscissa.
struct CCPoint {
  double t = 0.0;
  double convex = 0.0;
  double concave = 0.0;
  double concave_deriv = 0.0;
};

/// Strictly increasing evaluation points spanning [front, horizon].
class Abscissae {
 public:
  Abscissae() = default;
  explicit Abscissae(std::vector<CCPoint> points);

  /// Evaluate `cc` at each time in `times`.
  static Abscissae evaluate(const CCFunction& cc, std::span<const double> times);
  /// The default pair {0, horizon}.
  static Abscissae endpoints(const CCFunction& cc);

  const std::vector<CCPoint>& points() const { return points_; }
  std::vector<double> times() const;
  std::size_t size() const { return points_.size(); }
  double front() const { return points_.front().t; }
  double back() const { return points_.back().t; }

 private:
  std::vector<CCPoint> points_;
};

/// Chord of f_u through (t1, f_u(t1)) and (t2, f_u(t2)).
LinearSegment chord_bound(const CCPoint& p1, const CCPoint& p2);
LinearSegment chord_bound(const CCFunction& cc, double t1, double t2);

/// Tangent-line upper bound of f_n on [t1, t2): one or two pieces.
struct TangentPieces {
  std::array<LinearSegment, 2> pieces{};
  std::size_t count = 0;
  double intersection = 0.0;  ///< t*, clamped into [t1, t2]

  std::span<const LinearSegment> segments() const { return {pieces.data(), count}; }
};
TangentPieces tangent_bound(const CCPoint& p1, const CCPoint& p2);
TangentPieces tangent_bound(const CCFunction& cc, double t1, double t2);

/// Piecewise-linear upper bound of f_u + f_n over the abscissae.
///
/// The rate is stored in local time (t - origin) so it can be fed to
/// `first_arrival` directly; `value` takes times on the decomposition's clock.
struct Envelope {
  PiecewiseLinearRate plr;
  double origin = 0.0;

  double value(double t) const { return plr.value(t - origin); }
  double horizon() const { return origin + plr.horizon(); }
  std::string describe() const;
};

Envelope build_envelope(const CCFunction& cc, const Abscissae& abscissae);

/// Drop abscissae below `tau` and make `tau` the new first point, reusing the
/// values f_u(tau), f_n(tau) computed during the acceptance test.
Abscissae refine(const CCFunction& cc, const Abscissae& abscissae, double tau,
                 double convex_at_tau, double concave_at_tau);
Abscissae refine(const CCFunction& cc, const Abscissae& abscissae, double tau);

/// Sum of decompositions sharing a horizon.
CCFunction sum_cc(std::vector<CCFunction> parts);

struct ThinningResult {
  ClockOutcome outcome;
  std::size_t events_proposed = 0;
  std::size_t rejections = 0;
  std::size_t rate_evaluations = 0;
};

/// Proposal/acceptance state for one decomposition, advanced one step at a time.
///
/// `propose` draws the next arrival of the current envelope (after its
/// origin); `accept_or_refine` runs the thinning test at that arrival and, on
/// rejection, refines the abscissae so the next proposal starts there.
class AdaptiveThinning {
 public:
  AdaptiveThinning(CCFunction cc, Abscissae initial, EnvelopeTolerance tol = {});
  explicit AdaptiveThinning(CCFunction cc, EnvelopeTolerance tol = {});

  ClockOutcome propose(Rng& rng);
  bool accept_or_refine(double tau, Rng& rng);

  const CCFunction& cc() const { return cc_; }
  const Abscissae& abscissae() const { return abscissae_; }
  const Envelope& envelope();
  double horizon() const;

  std::size_t proposals() const { return proposals_; }
  std::size_t rejections() const { return rejections_; }
  std::size_t rate_evaluations() const { return rate_evaluations_; }

 private:
  void rebuild_envelope();

  CCFunction cc_;
  Abscissae abscissae_;
  Envelope envelope_;
  bool envelope_stale_ = true;
  EnvelopeTolerance tol_;
  std::size_t proposals_ = 0;
  std::size_t rejections_ = 0;
  std::size_t rate_evaluations_ = 0;
};

inline constexpr std::size_t kDefaultMaxThinningIters = 1000;

/// Full thinning loop for one event of max{0, f} on [0, horizon).
/// Throws ThinningStallError after `max_iters` rejections.
ThinningResult cc_first_event(const CCFunction& cc, const Abscissae& initial, Rng& rng,
                              std::size_t max_iters = kDefaultMaxThinningIters,
                              EnvelopeTolerance tol = {});

}  // namespace ccpdmp
