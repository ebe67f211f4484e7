#include <cmath>
#include <string>

#include "ccpdmp/samplers.hpp"
#include "ccpdmp/superposition.hpp"
#include "factor_clock.hpp"

namespace ccpdmp {

namespace {

using detail::FactorClock;

class GlobalRun {
 public:
  GlobalRun(const Model& model, PDMPState state0, double refresh_rate, const Tuning& tuning,
            Rng& rng)
      : model_(model),
        tuning_(tuning),
        rng_(rng),
        refresh_rate_(refresh_rate),
        t_last_(state0.t),
        theta_(std::move(state0.theta)),
        v_(std::move(state0.v)),
        coords_(model.all_coordinates()),
        bounds_(model.lower_bounds()),
        hits_(bounds_.size(), kInfinity),
        horizon_(tuning.make_horizon()),
        skeleton_(model.dimension(), tuning.recorded) {
    for (const auto& b : bounds_) has_bounds_ = has_bounds_ || b.has_value();
    skeleton_.per_factor.assign(1, {});
    if (refresh_rate_ == 0.0)
      skeleton_.warnings.push_back("refresh rate 0: the sampler may not be ergodic");
  }

  Skeleton run_cc(std::size_t n_events) {
    const double t0 = t_last_;
    skeleton_.horizons_used.push_back(horizon_.current());
    skeleton_.push(t0, theta_, v_, EventKind::Initial);
    update_hits(t0);
    clock_.restart = t0;
    rebuild(t0);
    draw_refresh(t0);

    auto& c = skeleton_.counters;
    while (c.events < n_events) {
      const auto [t_b, k_b] = next_boundary();
      const double t_c = clock_.next;
      if (t_c <= t_b && t_c <= next_refresh_) {
        if (!std::isfinite(t_c)) throw ThinningStallError("global sampler: no pending event");
        if (clock_.pending == FactorClock::Pending::Expiry) {
          ++c.shadow_events;
          ++skeleton_.per_factor[0].shadow_events;
          rebuild(t_c);
        } else if (!clock_.test(rng_, tuning_.max_thinning_iters)) {
          ++c.shadow_events;
          ++skeleton_.per_factor[0].shadow_events;
        } else {
          ++c.events;
          ++skeleton_.per_factor[0].events;
          if (horizon_.update(t_c - clock_.restart))
            skeleton_.horizons_used.push_back(horizon_.current());
          advance(t_c);
          reflect();
          update_hits(t_c);
          skeleton_.push(t_c, theta_, v_, EventKind::Event);
          clock_.restart = t_c;
          rebuild(t_c);
          ++c.resimulations;
        }
      } else if (t_b <= next_refresh_) {
        boundary(k_b, t_b);
        clock_.restart = t_b;
        rebuild(t_b);
      } else {
        refresh(next_refresh_);
        clock_.restart = t_last_;
        rebuild(t_last_);
        draw_refresh(t_last_);
      }
    }
    c.rate_evaluations += clock_.evaluations();
    return std::move(skeleton_);
  }

  Skeleton run_superposition(std::size_t n_events) {
    if (has_bounds_) throw DomainError("superposition thinning does not support bounded domains");
    if (!model_.has_superposition_terms())
      throw DomainError(model_.name() + ": superposition thinning needs closed-form rate terms");
    const double t0 = t_last_;
    skeleton_.push(t0, theta_, v_, EventKind::Initial);
    std::vector<ClockTerm> terms = model_.superposition_terms(theta_, v_);
    draw_refresh(t0);
    double offset = 0.0;
    std::size_t rejections = 0;
    auto& c = skeleton_.counters;
    while (c.events < n_events) {
      const auto proposal = superposition_propose(terms, offset, rng_);
      const double t = t_last_ + proposal.time;
      if (next_refresh_ < t) {
        refresh(next_refresh_);
        terms = model_.superposition_terms(theta_, v_);
        offset = 0.0;
        rejections = 0;
        draw_refresh(t_last_);
        continue;
      }
      if (!std::isfinite(t)) throw ThinningStallError("global sampler: no term can fire");
      const double ratio = superposition_acceptance(terms, proposal.time);
      c.rate_evaluations += terms.size();
      if (rng_.uniform() <= ratio) {
        ++c.events;
        ++skeleton_.per_factor[0].events;
        advance(t);
        reflect();
        skeleton_.push(t, theta_, v_, EventKind::Event);
        terms = model_.superposition_terms(theta_, v_);
        offset = 0.0;
        rejections = 0;
      } else {
        ++c.shadow_events;
        ++skeleton_.per_factor[0].shadow_events;
        if (++rejections >= tuning_.max_thinning_iters)
          throw ThinningStallError("superposition thinning stalled after " +
                                   std::to_string(rejections) + " rejections");
        offset = proposal.time;
      }
    }
    return std::move(skeleton_);
  }

 private:
  void advance(double t) {
    theta_ += (t - t_last_) * v_;
    t_last_ = t;
  }

  void rebuild(double t) {
    advance(t);
    double cap = kInfinity;
    if (has_bounds_) cap = detail::boundary_cap(theta_, v_, coords_, bounds_);
    const double h = detail::capped_horizon(horizon_.current(), cap);
    if (h == 0.0) {
      clock_.go_idle(t);
      return;
    }
    CCFunction cc = model_.rate(theta_, v_, coords_, h);
    if (std::isfinite(cap)) cc.affine_exact = false;
    clock_.build(std::move(cc), t, tuning_.tolerance, rng_);
  }

  void reflect() {
    try {
      v_ = reflect_full(v_, model_.gradient(theta_));
    } catch (const DegenerateReflectionError&) {
      ++skeleton_.counters.degenerate_reflections;
      skeleton_.warnings.push_back("zero gradient at a reflection; velocity refreshed");
      v_ = refresh_velocity(rng_, model_.dimension(), tuning_.velocity_space);
    }
  }

  void refresh(double t) {
    advance(t);
    v_ = refresh_velocity(rng_, model_.dimension(), tuning_.velocity_space);
    update_hits(t);
    ++skeleton_.counters.refreshes;
    skeleton_.push(t, theta_, v_, EventKind::Refresh);
  }

  void boundary(Index k, double t) {
    advance(t);
    theta_(k) = *bounds_[k];
    v_(k) = -v_(k);
    update_hits(t);
    ++skeleton_.counters.boundary_hits;
    skeleton_.push(t, theta_, v_, EventKind::Boundary);
  }

  void draw_refresh(double t) {
    next_refresh_ = refresh_rate_ > 0.0 ? t + rng_.exponential() / refresh_rate_ : kInfinity;
  }

  void update_hits(double t) {
    if (!has_bounds_) return;
    for (std::size_t k = 0; k < bounds_.size(); ++k) {
      hits_[k] = kInfinity;
      if (bounds_[k] && v_(k) < 0.0) hits_[k] = t + std::max(0.0, theta_(k) - *bounds_[k]) / -v_(k);
    }
  }

  std::pair<double, Index> next_boundary() const {
    double best = kInfinity;
    Index idx = 0;
    for (std::size_t k = 0; k < hits_.size(); ++k)
      if (hits_[k] < best) {
        best = hits_[k];
        idx = static_cast<Index>(k);
      }
    return {best, idx};
  }

  const Model& model_;
  const Tuning& tuning_;
  Rng& rng_;
  double refresh_rate_;
  double t_last_;
  VectorXd theta_;
  VectorXd v_;
  std::vector<Index> coords_;
  std::vector<std::optional<double>> bounds_;
  std::vector<double> hits_;
  bool has_bounds_ = false;
  AdaptiveHorizon horizon_;
  FactorClock clock_;
  Skeleton skeleton_;
  double next_refresh_ = kInfinity;
};

}  // namespace

Skeleton run_bps_global(const Model& model, PDMPState state0, double refresh_rate,
                        std::size_t n_events, const Tuning& tuning, Rng& rng) {
  if (!(refresh_rate >= 0.0) || !std::isfinite(refresh_rate))
    throw DomainError("bps: refresh rate must be finite and >= 0");
  if (state0.v.size() == 0)
    state0.v = refresh_velocity(rng, model.dimension(), tuning.velocity_space);
  detail::check_initial_state(model, state0);
  GlobalRun run(model, std::move(state0), refresh_rate, tuning, rng);
  if (tuning.method == ThinningMethod::Superposition) return run.run_superposition(n_events);
  return run.run_cc(n_events);
}

}  // namespace ccpdmp
