#include "ccpdmp/superposition.hpp"

#include <cmath>

#include "ccpdmp/errors.hpp"

namespace ccpdmp {

ClockTerm ClockTerm::affine(double a, double b) {
  ClockTerm term;
  term.rate = [a, b](double t) { return a + b * t; };
  term.arrival_after = [a, b](double from, double e) {
    const double a0 = a + b * from;
    if (b == 0.0) return a0 > 0.0 ? from + e / a0 : kInfinity;
    if (b < 0.0) {
      if (a0 <= 0.0) return kInfinity;
      const double mass = 0.5 * a0 * a0 / -b;
      if (mass <= e) return kInfinity;
    }
    // Positive part starts at the zero crossing when a0 < 0 < b.
    double start = from;
    double r0 = a0;
    if (a0 < 0.0) {
      start = from - a0 / b;
      r0 = 0.0;
    }
    const double disc = r0 * r0 + 2.0 * b * e;
    const double root = std::sqrt(std::max(disc, 0.0));
    return start + 2.0 * e / (r0 + root);
  };
  return term;
}

ClockTerm ClockTerm::exponential(double c, double r) {
  ClockTerm term;
  term.rate = [c, r](double t) { return c * std::exp(r * t); };
  term.arrival_after = [c, r](double from, double e) {
    if (c <= 0.0) return kInfinity;
    if (r == 0.0) return from + e / c;
    // int_from^t c e^{rs} ds = (c/r)(e^{rt} - e^{r from}).
    const double x = r * e / c;
    if (r < 0.0) {
      const double total = c * std::exp(r * from) / -r;
      if (total <= e) return kInfinity;
    }
    // log(e^{r from} + x) / r, written to avoid overflow of e^{r from}.
    return from + std::log1p(x * std::exp(-r * from)) / r;
  };
  return term;
}

SuperpositionProposal superposition_propose(std::span<const ClockTerm> terms, double from,
                                            Rng& rng) {
  if (terms.empty()) throw DomainError("superposition: no terms");
  SuperpositionProposal best;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double t = terms[i].arrival_after(from, rng.exponential());
    if (t < best.time) best = {t, i};
  }
  return best;
}

double superposition_acceptance(std::span<const ClockTerm> terms, double t) {
  double total = 0.0;
  double positive = 0.0;
  for (const auto& term : terms) {
    const double f = term.rate(t);
    if (!std::isfinite(f)) throw EvaluationError("superposition: non-finite term rate");
    total += f;
    positive += std::max(0.0, f);
  }
  if (positive <= 0.0) throw InvalidProposalError("superposition: proposal at a zero-rate time");
  return std::min(1.0, std::max(0.0, total) / positive);
}

ThinningResult superposition_event(std::span<const ClockTerm> terms, Rng& rng,
                                   std::size_t max_iters) {
  ThinningResult result;
  double from = 0.0;
  while (true) {
    const auto proposal = superposition_propose(terms, from, rng);
    if (!std::isfinite(proposal.time)) {
      result.outcome = ClockOutcome::no_event(kInfinity);
      return result;
    }
    ++result.events_proposed;
    result.rate_evaluations += terms.size();
    if (rng.uniform() <= superposition_acceptance(terms, proposal.time)) {
      result.outcome = ClockOutcome::event(proposal.time);
      return result;
    }
    if (++result.rejections >= max_iters)
      throw ThinningStallError("superposition: " + std::to_string(result.rejections) +
                               " consecutive rejections");
    from = proposal.time;
  }
}

}  // namespace ccpdmp
