#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ccpdmp/cc_envelope.hpp"

namespace ccpdmp {

/// One additive term f_i of a rate that can be simulated on its own, i.e. the
/// first arrival of max{0, f_i} after a given time has a closed form.
struct ClockTerm {
  ScalarFunction rate;
  /// Smallest t > from with int_from^t max{0, f_i} = e, or +inf.
  std::function<double(double from, double e)> arrival_after;

  /// f(t) = a + b t.
  static ClockTerm affine(double a, double b);
  /// f(t) = c exp(r t).
  static ClockTerm exponential(double c, double r);
};

struct SuperpositionProposal {
  double time = kInfinity;
  std::size_t term = 0;
};

/// Minimum over the terms of independent arrivals after `from`.
/// One exponential draw per term, in term order.
SuperpositionProposal superposition_propose(std::span<const ClockTerm> terms, double from, Rng& rng);

/// max{0, sum f_i(t)} / sum max{0, f_i(t)}.
double superposition_acceptance(std::span<const ClockTerm> terms, double t);

/// Thinning loop with proposals from the superposed terms.
/// NoEvent(+inf) when no term ever fires.
ThinningResult superposition_event(std::span<const ClockTerm> terms, Rng& rng,
                                   std::size_t max_iters = kDefaultMaxThinningIters);

}  // namespace ccpdmp
