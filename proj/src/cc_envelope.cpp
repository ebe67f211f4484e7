#include "ccpdmp/cc_envelope.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "ccpdmp/errors.hpp"

namespace ccpdmp {

namespace {

constexpr double kDerivEqualTol = 1e-12;
constexpr double kIntersectionWindow = 1e-9;
constexpr double kCoincidentAbscissa = 1e-12;

void require_finite(const CCPoint& p) {
  if (!std::isfinite(p.convex) || !std::isfinite(p.concave) || !std::isfinite(p.concave_deriv)) {
    std::ostringstream msg;
    msg << "non-finite decomposition value at t=" << p.t << " (f_u=" << p.convex
        << ", f_n=" << p.concave << ", f_n'=" << p.concave_deriv << ")";
    throw EvaluationError(msg.str());
  }
}

CCPoint evaluate_point(const CCFunction& cc, double t) {
  CCPoint p{t, cc.convex(t), cc.concave(t), cc.concave_deriv(t)};
  require_finite(p);
  return p;
}

}  // namespace

CCFunction zero_cc(double horizon) {
  auto zero = [](double) { return 0.0; };
  return CCFunction{zero, zero, zero, horizon, {}, true};
}

Abscissae::Abscissae(std::vector<CCPoint> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw DomainError("abscissae need at least two points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    require_finite(points_[i]);
    if (i > 0 && !(points_[i].t > points_[i - 1].t)) {
      throw DomainError("abscissae must be strictly increasing");
    }
  }
}

Abscissae Abscissae::evaluate(const CCFunction& cc, std::span<const double> times) {
  std::vector<CCPoint> pts;
  pts.reserve(times.size());
  for (double t : times) pts.push_back(evaluate_point(cc, t));
  return Abscissae(std::move(pts));
}

Abscissae Abscissae::endpoints(const CCFunction& cc) {
  if (!(cc.horizon > 0.0) || !std::isfinite(cc.horizon)) {
    throw DomainError("decomposition horizon must be positive and finite");
  }
  const std::array<double, 2> ts{0.0, cc.horizon};
  return evaluate(cc, ts);
}

std::vector<double> Abscissae::times() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.t);
  return out;
}

LinearSegment chord_bound(const CCPoint& p1, const CCPoint& p2) {
  if (!(p2.t > p1.t)) throw DomainError("chord_bound needs t1 < t2");
  require_finite(p1);
  require_finite(p2);
  const double slope = (p2.convex - p1.convex) / (p2.t - p1.t);
  return {p1.t, p2.t, p1.convex, slope};
}

LinearSegment chord_bound(const CCFunction& cc, double t1, double t2) {
  if (!(t1 >= 0.0) || !(t2 > t1) || t2 > cc.horizon) {
    throw DomainError("chord_bound needs 0 <= t1 < t2 <= horizon");
  }
  return chord_bound(evaluate_point(cc, t1), evaluate_point(cc, t2));
}

TangentPieces tangent_bound(const CCPoint& p1, const CCPoint& p2) {
  if (!(p2.t > p1.t)) throw DomainError("tangent_bound needs t1 < t2");
  require_finite(p1);
  require_finite(p2);
  const double t1 = p1.t;
  const double t2 = p2.t;
  const double d1 = p1.concave_deriv;
  const double d2 = p2.concave_deriv;

  TangentPieces out;
  const double scale = std::max({1.0, std::abs(d1), std::abs(d2)});
  if (std::abs(d1 - d2) <= kDerivEqualTol * scale) {
    out.pieces[0] = {t1, t2, p1.concave, d1};
    out.count = 1;
    out.intersection = t2;
    return out;
  }

  const double numer = p2.concave - d2 * t2 - p1.concave + d1 * t1;
  double t_star = numer / (d1 - d2);
  // Rounding in the numerator is amplified by a small derivative gap.
  const double noise = 1e-12 *
                       (std::abs(p1.concave) + std::abs(p2.concave) + std::abs(d1 * t1) +
                        std::abs(d2 * t2)) /
                       std::abs(d1 - d2);
  const double window = kIntersectionWindow * std::max(1.0, std::abs(t2)) + noise;
  if (!std::isfinite(t_star) || t_star < t1 - window || t_star > t2 + window) {
    std::ostringstream msg;
    msg << "tangent intersection t*=" << t_star << " outside [" << t1 << ", " << t2
        << "]: f_n is not concave (f_n'(t1)=" << d1 << ", f_n'(t2)=" << d2 << ")";
    throw ConcavityViolationError(msg.str());
  }
  t_star = std::clamp(t_star, t1, t2);
  out.intersection = t_star;
  if (t_star > t1) out.pieces[out.count++] = {t1, t_star, p1.concave, d1};
  if (t_star < t2) out.pieces[out.count++] = {t_star, t2, p2.concave + d2 * (t_star - t2), d2};
  return out;
}

TangentPieces tangent_bound(const CCFunction& cc, double t1, double t2) {
  if (!(t1 >= 0.0) || !(t2 > t1) || t2 > cc.horizon) {
    throw DomainError("tangent_bound needs 0 <= t1 < t2 <= horizon");
  }
  return tangent_bound(evaluate_point(cc, t1), evaluate_point(cc, t2));
}

std::string Envelope::describe() const {
  std::ostringstream out;
  out << "envelope(origin=" << origin << ")";
  for (const auto& s : plr.segments()) {
    out << " [" << origin + s.t_start << ", " << origin + s.t_end << "): " << s.a << " + "
        << s.b << "*(t - t0)";
  }
  return out.str();
}

Envelope build_envelope(const CCFunction& cc, const Abscissae& abscissae) {
  const auto& pts = abscissae.points();
  const double origin = pts.front().t;
  std::vector<LinearSegment> segs;
  segs.reserve(2 * pts.size());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const LinearSegment chord = chord_bound(pts[i], pts[i + 1]);
    const TangentPieces tangent = tangent_bound(pts[i], pts[i + 1]);
    for (const auto& piece : tangent.segments()) {
      segs.push_back({piece.t_start - origin, piece.t_end - origin,
                      chord.value(piece.t_start) + piece.a, chord.b + piece.b});
    }
  }
  if (cc.affine_exact) segs.back().t_end = kInfinity;
  return Envelope{PiecewiseLinearRate(std::move(segs)), origin};
}

Abscissae refine(const CCFunction& cc, const Abscissae& abscissae, double tau,
                 double convex_at_tau, double concave_at_tau) {
  if (!(tau > abscissae.front()) || !(tau < abscissae.back())) {
    throw DomainError("refine: rejection time outside the abscissae span");
  }
  const auto& pts = abscissae.points();
  auto near = std::lower_bound(pts.begin(), pts.end(), tau - kCoincidentAbscissa,
                               [](const CCPoint& p, double t) { return p.t < t; });
  if (near->t <= tau + kCoincidentAbscissa && near + 1 != pts.end()) {
    return Abscissae(std::vector<CCPoint>(near, pts.end()));
  }
  auto first_kept = std::upper_bound(pts.begin(), pts.end(), tau,
                                     [](double t, const CCPoint& p) { return t < p.t; });
  std::vector<CCPoint> out;
  out.reserve(static_cast<std::size_t>(pts.end() - first_kept) + 1);
  CCPoint p{tau, convex_at_tau, concave_at_tau, cc.concave_deriv(tau)};
  require_finite(p);
  out.push_back(p);
  out.insert(out.end(), first_kept, pts.end());
  return Abscissae(std::move(out));
}

Abscissae refine(const CCFunction& cc, const Abscissae& abscissae, double tau) {
  return refine(cc, abscissae, tau, cc.convex(tau), cc.concave(tau));
}

CCFunction sum_cc(std::vector<CCFunction> parts) {
  if (parts.empty()) throw DomainError("sum_cc needs at least one decomposition");
  if (parts.size() == 1) return std::move(parts.front());
  const double horizon = parts.front().horizon;
  bool any_target = false;
  bool all_affine = true;
  for (const auto& p : parts) {
    if (std::abs(p.horizon - horizon) > 1e-12 * std::max(1.0, horizon)) {
      throw DomainError("sum_cc: decompositions have different horizons");
    }
    any_target = any_target || static_cast<bool>(p.eval_target);
    all_affine = all_affine && p.affine_exact;
  }
  auto shared = std::make_shared<const std::vector<CCFunction>>(std::move(parts));
  CCFunction out;
  out.horizon = horizon;
  out.affine_exact = all_affine;
  out.eval_convex = [shared](double t) {
    double s = 0.0;
    for (const auto& p : *shared) s += p.convex(t);
    return s;
  };
  out.eval_concave = [shared](double t) {
    double s = 0.0;
    for (const auto& p : *shared) s += p.concave(t);
    return s;
  };
  out.eval_concave_deriv = [shared](double t) {
    double s = 0.0;
    for (const auto& p : *shared) s += p.concave_deriv(t);
    return s;
  };
  if (any_target) {
    out.eval_target = [shared](double t) {
      double s = 0.0;
      for (const auto& p : *shared) s += p.target(t);
      return s;
    };
  }
  return out;
}

AdaptiveThinning::AdaptiveThinning(CCFunction cc, Abscissae initial, EnvelopeTolerance tol)
    : cc_(std::move(cc)), abscissae_(std::move(initial)), tol_(tol) {
  rate_evaluations_ += abscissae_.size();
}

AdaptiveThinning::AdaptiveThinning(CCFunction cc, EnvelopeTolerance tol)
    : AdaptiveThinning(cc, Abscissae::endpoints(cc), tol) {}

double AdaptiveThinning::horizon() const {
  return cc_.affine_exact ? kInfinity : abscissae_.back();
}

void AdaptiveThinning::rebuild_envelope() {
  envelope_ = build_envelope(cc_, abscissae_);
  envelope_stale_ = false;
}

const Envelope& AdaptiveThinning::envelope() {
  if (envelope_stale_) rebuild_envelope();
  return envelope_;
}

ClockOutcome AdaptiveThinning::propose(Rng& rng) {
  const Envelope& env = envelope();
  const ClockOutcome local = first_arrival(env.plr, rng);
  if (!local.is_event()) return ClockOutcome::no_event(horizon());
  ++proposals_;
  return ClockOutcome::event(env.origin + local.time);
}

bool AdaptiveThinning::accept_or_refine(double tau, Rng& rng) {
  const double fu = cc_.convex(tau);
  const double fn = cc_.concave(tau);
  const double target = cc_.eval_target ? cc_.eval_target(tau) : fu + fn;
  ++rate_evaluations_;
  if (!std::isfinite(fu) || !std::isfinite(fn) || !std::isfinite(target)) {
    throw EvaluationError("non-finite rate at proposal time " + std::to_string(tau));
  }
  const double bound = envelope().value(tau);
  const double u = rng.uniform();
  bool accepted = false;
  if (bound > 0.0) {
    accepted = thinning_accept(target, bound, u, tol_);
  } else if (std::max(0.0, target) - bound > tol_.allowance(target)) {
    throw EnvelopeViolationError("target rate " + std::to_string(target) +
                                 " exceeds envelope " + std::to_string(bound) + "; " +
                                 envelope_.describe());
  }
  if (accepted) return true;

  ++rejections_;
  if (cc_.affine_exact && !(tau < abscissae_.back())) {
    const std::array<double, 2> ts{tau, tau + cc_.horizon};
    abscissae_ = Abscissae::evaluate(cc_, ts);
    rate_evaluations_ += 2;
  } else {
    abscissae_ = refine(cc_, abscissae_, tau, fu, fn);
  }
  envelope_stale_ = true;
  return false;
}

ThinningResult cc_first_event(const CCFunction& cc, const Abscissae& initial, Rng& rng,
                              std::size_t max_iters, EnvelopeTolerance tol) {
  if (max_iters < 1) throw DomainError("cc_first_event: max_iters must be >= 1");
  AdaptiveThinning thinning(cc, initial, tol);
  for (;;) {
    const ClockOutcome proposal = thinning.propose(rng);
    if (!proposal.is_event()) {
      return {proposal, thinning.proposals(), thinning.rejections(), thinning.rate_evaluations()};
    }
    if (thinning.accept_or_refine(proposal.time, rng)) {
      return {proposal, thinning.proposals(), thinning.rejections(), thinning.rate_evaluations()};
    }
    if (thinning.rejections() >= max_iters) {
      throw ThinningStallError("thinning stalled after " + std::to_string(max_iters) +
                               " rejections; final " + thinning.envelope().describe());
    }
  }
}

}  // namespace ccpdmp
