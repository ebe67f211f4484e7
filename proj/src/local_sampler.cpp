#include <algorithm>
#include <cmath>
#include <string>

#include "ccpdmp/event_queue.hpp"
#include "ccpdmp/samplers.hpp"
#include "factor_clock.hpp"

namespace ccpdmp {

// ---- Factorisation ----

Factorisation Factorisation::build(const Model& model, std::vector<std::vector<Index>> factors) {
  const Index p = model.dimension();
  if (factors.empty()) throw DomainError("factorisation: no factors");
  std::vector<std::size_t> owner(static_cast<std::size_t>(p), factors.size());
  for (std::size_t f = 0; f < factors.size(); ++f) {
    if (factors[f].empty()) throw DomainError("factorisation: empty factor");
    for (Index k : factors[f]) {
      if (k < 0 || k >= p) throw DomainError("factorisation: coordinate out of range");
      if (owner[k] != factors.size())
        throw DomainError("factorisation: coordinate " + std::to_string(k) + " in two factors");
      owner[k] = f;
    }
  }
  for (Index k = 0; k < p; ++k)
    if (owner[k] == factors.size())
      throw DomainError("factorisation: coordinate " + std::to_string(k) + " not covered");

  Factorisation out;
  out.factors = std::move(factors);
  const std::size_t nf = out.factors.size();
  out.reads.resize(nf);
  out.neighbours.resize(nf);
  for (std::size_t m = 0; m < nf; ++m) {
    auto& reads = out.reads[m];
    for (Index k : out.factors[m]) {
      reads.push_back(k);
      for (Index j : model.dependencies(k)) reads.push_back(j);
    }
    std::sort(reads.begin(), reads.end());
    reads.erase(std::unique(reads.begin(), reads.end()), reads.end());
    // Factor m must be re-simulated whenever a factor owning one of its reads moves.
    for (Index j : reads) out.neighbours[owner[j]].push_back(m);
  }
  for (auto& n : out.neighbours) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  return out;
}

Factorisation Factorisation::singletons(const Model& model) { return chain_blocks(model, 1); }

Factorisation Factorisation::chain_blocks(const Model& model, Index block) {
  if (block < 1) throw DomainError("factorisation: block size must be >= 1");
  std::vector<std::vector<Index>> factors;
  for (Index k = 0; k < model.dimension(); k += block) {
    std::vector<Index> f;
    for (Index j = k; j < std::min(model.dimension(), k + block); ++j) f.push_back(j);
    factors.push_back(std::move(f));
  }
  return build(model, std::move(factors));
}

Factorisation Factorisation::single(const Model& model) {
  return build(model, {model.all_coordinates()});
}

// ---- local sampler ----

namespace {

using detail::FactorClock;

class LocalRun {
 public:
  LocalRun(const Model& model, const Factorisation& fact, LocalKernel kernel, PDMPState state0,
           const Tuning& tuning, Rng& rng)
      : model_(model),
        fact_(fact),
        kernel_(kernel),
        tuning_(tuning),
        rng_(rng),
        p_(model.dimension()),
        theta_(std::move(state0.theta)),
        v_(std::move(state0.v)),
        stamp_(static_cast<std::size_t>(p_), state0.t),
        bounds_(model.lower_bounds()),
        horizon_(tuning.make_horizon()),
        clocks_(fact.size()),
        skeleton_(p_, tuning.recorded),
        queue_(1) {
    for (Index k = 0; k < p_; ++k) {
      if (bounds_[k]) {
        slot_of_.push_back(static_cast<std::size_t>(bounded_.size()));
        bounded_.push_back(k);
      } else {
        slot_of_.push_back(kNoSlot);
      }
    }
    owner_.assign(static_cast<std::size_t>(p_), 0);
    for (std::size_t f = 0; f < fact.size(); ++f)
      for (Index k : fact.factors[f]) owner_[k] = f;
    record_all_ = static_cast<Index>(skeleton_.recorded().size()) == p_;
    rec_theta_.resize(skeleton_.recorded().size());
    rec_v_.resize(skeleton_.recorded().size());
    refresh_id_ = fact.size() + bounded_.size();
    queue_ = LocalEventQueue(refresh_id_ + 1);
    skeleton_.per_factor.assign(fact.size(), {});
  }

  Skeleton run(std::size_t n_events, double t0) {
    if (!(tuning_.refresh_rate >= 0.0) || !std::isfinite(tuning_.refresh_rate))
      throw DomainError("local sampler: refresh rate must be finite and >= 0");
    if (tuning_.refresh_rate == 0.0 && kernel_ == LocalKernel::ReflectSubset) {
      for (const auto& f : fact_.factors)
        if (f.size() > 1) {
          skeleton_.warnings.push_back(
              "refresh rate 0 with reflections: the sampler may not be ergodic");
          break;
        }
    }
    skeleton_.horizons_used.push_back(horizon_.current());
    record(t0, EventKind::Initial);
    for (Index k : bounded_) set_hit(k, t0);
    for (std::size_t f = 0; f < fact_.size(); ++f) {
      clocks_[f].restart = t0;
      rebuild(f, t0);
    }
    if (tuning_.refresh_rate > 0.0)
      queue_.set(refresh_id_, t0 + rng_.exponential() / tuning_.refresh_rate);

    auto& c = skeleton_.counters;
    while (c.events < n_events) {
      const std::size_t id = queue_.top();
      const double t = queue_.top_time();
      if (!std::isfinite(t)) throw ThinningStallError("local sampler: no pending event on any clock");
      if (id < fact_.size()) {
        factor_step(id, t);
      } else if (id < refresh_id_) {
        boundary_step(bounded_[id - fact_.size()], t);
      } else {
        refresh_step(t);
      }
    }
    for (const auto& clock : clocks_) c.rate_evaluations += clock.evaluations();
    return std::move(skeleton_);
  }

 private:
  static constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);

  void materialize(Index k, double t) {
    if (stamp_[k] != t) {
      theta_(k) += (t - stamp_[k]) * v_(k);
      stamp_[k] = t;
    }
  }

  void materialize(const std::vector<Index>& coords, double t) {
    for (Index k : coords) materialize(k, t);
  }

  void materialize_all(double t) {
    for (Index k = 0; k < p_; ++k) materialize(k, t);
  }

  void record(double t, EventKind kind) {
    if (record_all_) {
      materialize_all(t);
      skeleton_.push(t, theta_, v_, kind);
      return;
    }
    const auto& rec = skeleton_.recorded();
    for (std::size_t j = 0; j < rec.size(); ++j) {
      materialize(rec[j], t);
      rec_theta_[j] = theta_(rec[j]);
      rec_v_[j] = v_(rec[j]);
    }
    skeleton_.push_recorded(t, rec_theta_.data(), rec_v_.data(), kind);
  }

  // theta_k must be current at t.
  void set_hit(Index k, double t) {
    const std::size_t slot = slot_of_[k];
    if (slot == kNoSlot) return;
    double hit = kInfinity;
    if (v_(k) < 0.0) hit = t + std::max(0.0, theta_(k) - *bounds_[k]) / -v_(k);
    queue_.set(fact_.size() + slot, hit);
  }

  void rebuild(std::size_t f, double t) {
    const auto& reads = fact_.reads[f];
    materialize(reads, t);
    FactorClock& clock = clocks_[f];
    double cap = kInfinity;
    if (!bounded_.empty()) cap = detail::boundary_cap(theta_, v_, reads, bounds_);
    const double h = detail::capped_horizon(horizon_.current(), cap);
    if (h == 0.0) {
      clock.go_idle(t);
    } else {
      CCFunction cc = model_.rate(theta_, v_, fact_.factors[f], h);
      if (std::isfinite(cap)) cc.affine_exact = false;
      clock.build(std::move(cc), t, tuning_.tolerance, rng_);
    }
    queue_.set(f, clock.next);
  }

  void factor_step(std::size_t f, double t) {
    FactorClock& clock = clocks_[f];
    auto& c = skeleton_.counters;
    if (clock.pending == FactorClock::Pending::Expiry) {
      // Windows that close together form one sampler iteration.
      if (t != last_expiry_) ++c.shadow_events;
      last_expiry_ = t;
      ++skeleton_.per_factor[f].shadow_events;
      rebuild(f, t);
      return;
    }
    if (!clock.test(rng_, tuning_.max_thinning_iters)) {
      ++c.shadow_events;
      ++skeleton_.per_factor[f].shadow_events;
      queue_.set(f, clock.next);
      return;
    }
    ++c.events;
    ++skeleton_.per_factor[f].events;
    if (horizon_.update(t - clock.restart)) skeleton_.horizons_used.push_back(horizon_.current());

    materialize(fact_.reads[f], t);
    if (!apply_kernel(f)) {
      // Degenerate reflection: full velocity refresh, every clock re-simulated.
      materialize_all(t);
      v_ = refresh_velocity(rng_, p_, tuning_.velocity_space);
      for (Index k : bounded_) set_hit(k, t);
      record(t, EventKind::Event);
      for (std::size_t m = 0; m < fact_.size(); ++m) {
        clocks_[m].restart = t;
        rebuild(m, t);
      }
      c.resimulations += fact_.size();
      return;
    }
    for (Index k : fact_.factors[f]) set_hit(k, t);
    record(t, EventKind::Event);
    for (std::size_t m : fact_.neighbours[f]) {
      clocks_[m].restart = t;
      rebuild(m, t);
    }
    c.resimulations += fact_.neighbours[f].size();
  }

  // False when the reflection is degenerate.
  bool apply_kernel(std::size_t f) {
    const auto& s = fact_.factors[f];
    if (kernel_ == LocalKernel::FlipAll) {
      for (Index k : s) v_(k) = -v_(k);
      return true;
    }
    if (static_cast<Index>(s.size()) == p_) {
      try {
        v_ = reflect_full(v_, model_.gradient(theta_));
        return true;
      } catch (const DegenerateReflectionError&) {
        return degenerate();
      }
    }
    grad_.resize(s.size());
    double dot = 0.0;
    double norm2 = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      grad_[j] = model_.partial(theta_, s[j]);
      dot += v_(s[j]) * grad_[j];
      norm2 += grad_[j] * grad_[j];
    }
    if (!(norm2 > 0.0)) return degenerate();
    const double scale = 2.0 * dot / norm2;
    for (std::size_t j = 0; j < s.size(); ++j) v_(s[j]) -= scale * grad_[j];
    return true;
  }

  bool degenerate() {
    ++skeleton_.counters.degenerate_reflections;
    skeleton_.warnings.push_back("zero gradient at a reflection; velocity refreshed");
    return false;
  }

  void boundary_step(Index k, double t) {
    materialize(k, t);
    theta_(k) = *bounds_[k];
    v_(k) = -v_(k);
    set_hit(k, t);
    ++skeleton_.counters.boundary_hits;
    record(t, EventKind::Boundary);
    for (std::size_t m : fact_.neighbours[owner_[k]]) {
      clocks_[m].restart = t;
      rebuild(m, t);
    }
  }

  void refresh_step(double t) {
    materialize_all(t);
    v_ = refresh_velocity(rng_, p_, tuning_.velocity_space);
    for (Index k : bounded_) set_hit(k, t);
    ++skeleton_.counters.refreshes;
    record(t, EventKind::Refresh);
    for (std::size_t m = 0; m < fact_.size(); ++m) {
      clocks_[m].restart = t;
      rebuild(m, t);
    }
    queue_.set(refresh_id_, t + rng_.exponential() / tuning_.refresh_rate);
  }

  const Model& model_;
  const Factorisation& fact_;
  LocalKernel kernel_;
  const Tuning& tuning_;
  Rng& rng_;
  Index p_;
  VectorXd theta_;
  VectorXd v_;
  std::vector<double> stamp_;
  std::vector<std::optional<double>> bounds_;
  std::vector<Index> bounded_;
  std::vector<std::size_t> slot_of_;
  std::vector<std::size_t> owner_;
  AdaptiveHorizon horizon_;
  std::vector<FactorClock> clocks_;
  Skeleton skeleton_;
  LocalEventQueue queue_;
  std::size_t refresh_id_ = 0;
  double last_expiry_ = -kInfinity;
  bool record_all_ = true;
  std::vector<double> rec_theta_;
  std::vector<double> rec_v_;
  std::vector<double> grad_;
};

}  // namespace

Skeleton run_local(const Model& model, const Factorisation& fact, LocalKernel kernel,
                   PDMPState state0, std::size_t n_events, const Tuning& tuning, Rng& rng) {
  Index covered = 0;
  for (const auto& f : fact.factors) covered += static_cast<Index>(f.size());
  if (covered != model.dimension() || fact.neighbours.size() != fact.size() ||
      fact.reads.size() != fact.size())
    throw DomainError("local sampler: factorisation does not match the model dimension");
  if (state0.v.size() == 0) {
    state0.v = kernel == LocalKernel::FlipAll
                   ? VectorXd::Ones(model.dimension())
                   : refresh_velocity(rng, model.dimension(), tuning.velocity_space);
  }
  detail::check_initial_state(model, state0);
  const double t0 = state0.t;
  LocalRun run(model, fact, kernel, std::move(state0), tuning, rng);
  return run.run(n_events, t0);
}

Skeleton run_zigzag(const Model& model, PDMPState state0, std::size_t n_events,
                    const Tuning& tuning, Rng& rng) {
  if (state0.v.size() == 0) state0.v = VectorXd::Ones(model.dimension());
  for (Index k = 0; k < state0.v.size(); ++k)
    if (state0.v(k) != 1.0 && state0.v(k) != -1.0)
      throw DomainError("zigzag: velocity components must be +1 or -1");
  Tuning zz = tuning;
  zz.velocity_space = VelocitySpace::ZigZag;
  const Factorisation fact = Factorisation::singletons(model);
  return run_local(model, fact, LocalKernel::FlipAll, std::move(state0), n_events, zz, rng);
}

}  // namespace ccpdmp
