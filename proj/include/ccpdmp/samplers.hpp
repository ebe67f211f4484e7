#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "ccpdmp/cc_envelope.hpp"
#include "ccpdmp/kernels.hpp"
#include "ccpdmp/models.hpp"
#include "ccpdmp/skeleton.hpp"
#include "ccpdmp/tuning.hpp"

namespace ccpdmp {

struct PDMPState {
  double t = 0.0;
  VectorXd theta;
  VectorXd v;  ///< empty: use the sampler's default initial velocity
};

enum class ThinningMethod { ConcaveConvex, Superposition };

struct Tuning {
  double tau_max = 1.0;  ///< fixed horizon, or the initial one when adaptive
  bool adaptive_horizon = false;
  double percentile = 80.0;
  std::size_t window = 100;
  std::size_t max_thinning_iters = kDefaultMaxThinningIters;
  EnvelopeTolerance tolerance{};
  double refresh_rate = 0.0;  ///< used by run_local; run_bps_global takes its own
  VelocitySpace velocity_space = VelocitySpace::Gaussian;
  std::vector<Index> recorded;  ///< coordinates stored in the skeleton; empty = all
  ThinningMethod method = ThinningMethod::ConcaveConvex;

  AdaptiveHorizon make_horizon() const {
    return AdaptiveHorizon(tau_max, percentile, window, adaptive_horizon);
  }
};

/// Partition of the coordinates into factors plus, for every factor, the
/// factors whose rates read its coordinates.
struct Factorisation {
  std::vector<std::vector<Index>> factors;
  std::vector<std::vector<std::size_t>> neighbours;
  std::vector<std::vector<Index>> reads;  ///< coordinates each factor's rate reads

  std::size_t size() const { return factors.size(); }

  /// Neighbour sets derived from the model's dependency graph.
  static Factorisation build(const Model& model, std::vector<std::vector<Index>> factors);
  static Factorisation singletons(const Model& model);
  /// Consecutive blocks of `block` coordinates (the last may be shorter).
  static Factorisation chain_blocks(const Model& model, Index block);
  static Factorisation single(const Model& model);
};

enum class LocalKernel { FlipAll, ReflectSubset };

/// Zig-Zag: singleton factors with component flips.
Skeleton run_zigzag(const Model& model, PDMPState state0, std::size_t n_events,
                    const Tuning& tuning, Rng& rng);

/// Global Bouncy Particle Sampler with refreshment rate `refresh_rate`.
Skeleton run_bps_global(const Model& model, PDMPState state0, double refresh_rate,
                        std::size_t n_events, const Tuning& tuning, Rng& rng);

/// Local PDMP over the factorisation; `tuning.refresh_rate` refreshes the full velocity.
Skeleton run_local(const Model& model, const Factorisation& fact, LocalKernel kernel,
                   PDMPState state0, std::size_t n_events, const Tuning& tuning, Rng& rng);

}  // namespace ccpdmp
