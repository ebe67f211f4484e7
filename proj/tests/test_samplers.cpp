#include "doctest.h"

#include <cmath>
#include <vector>

#include "ccpdmp/errors.hpp"
#include "ccpdmp/estimation.hpp"
#include "ccpdmp/event_queue.hpp"
#include "ccpdmp/kernels.hpp"
#include "ccpdmp/models.hpp"
#include "ccpdmp/samplers.hpp"
#include "ccpdmp/superposition.hpp"
#include "support.hpp"

using namespace ccpdmp;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

PDMPState at_origin(Index p) { return {0.0, VectorXd::Zero(p), VectorXd()}; }

void check_linear_dynamics(const Skeleton& sk) {
  for (std::size_t i = 1; i < sk.size(); ++i) {
    CHECK(sk.time(i) >= sk.time(i - 1));
    const double dt = sk.time(i) - sk.time(i - 1);
    const VectorXd predicted = sk.position(i - 1) + dt * sk.velocity(i - 1);
    CHECK((predicted - sk.position(i)).cwiseAbs().maxCoeff() <= 1e-9 * (1 + sk.time(i)));
  }
}

double sample_variance(const VectorXd& x) {
  return (x.array() - x.mean()).square().sum() / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST_CASE("flip") {
  CHECK(flip(vec({1, 1}), 0) == vec({-1, 1}));
  CHECK(flip(vec({-1, 1}), 1) == vec({-1, -1}));
  const VectorXd v = vec({1, -1, 1});
  CHECK(flip(flip(v, 2), 2) == v);
  CHECK_THROWS_AS(flip(v, 3), DomainError);
  CHECK_THROWS_AS(flip(v, -1), DomainError);
}

TEST_CASE("reflections") {
  CHECK(reflect_full(vec({1, 0}), vec({1, 0})) == vec({-1, 0}));
  CHECK(reflect_full(vec({1, 1}), vec({0, 2})) == vec({1, -1}));
  CHECK_THROWS_AS(reflect_full(vec({1, 1}), vec({0, 0})), DegenerateReflectionError);

  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const VectorXd v = refresh_velocity(rng, 5, VelocitySpace::Gaussian);
    const VectorXd g = refresh_velocity(rng, 5, VelocitySpace::Gaussian);
    const VectorXd r = reflect_full(v, g);
    CHECK(std::abs(r.norm() - v.norm()) <= 1e-12 * (1 + v.norm()));
    CHECK((reflect_full(r, g) - v).cwiseAbs().maxCoeff() <= 1e-12 * (1 + v.norm()));
    CHECK(std::abs(r.dot(g) + v.dot(g)) <= 1e-9);

    const Index subset[] = {1, 3};
    const VectorXd s = reflect_subset(v, g, subset);
    CHECK(s(0) == v(0));
    CHECK(s(2) == v(2));
    CHECK(s(4) == v(4));
    CHECK(std::hypot(s(1), s(3)) == doctest::Approx(std::hypot(v(1), v(3))));
    const Index all[] = {0, 1, 2, 3, 4};
    CHECK((reflect_subset(v, g, all) - r).cwiseAbs().maxCoeff() <= 1e-12);
  }
  const Index one[] = {0};
  CHECK(reflect_subset(vec({1, 1}), vec({3, 99}), one) == vec({-1, 1}));
  CHECK_THROWS_AS(reflect_subset(vec({1, 1}), vec({0, 99}), one), DegenerateReflectionError);
}

TEST_CASE("refresh velocities") {
  Rng rng(2);
  const VectorXd z = refresh_velocity(rng, 3, VelocitySpace::ZigZag);
  for (Index i = 0; i < 3; ++i) CHECK(std::abs(z(i)) == 1.0);
  for (int i = 0; i < 100; ++i)
    CHECK(std::abs(refresh_velocity(rng, 4, VelocitySpace::UnitSphere).norm() - 1.0) <= 1e-12);
  const int n = 100000;
  Eigen::MatrixXd draws(n, 3);
  for (int i = 0; i < n; ++i) draws.row(i) = refresh_velocity(rng, 3, VelocitySpace::Gaussian);
  for (Index j = 0; j < 3; ++j) {
    CHECK(std::abs(draws.col(j).mean()) < 0.02);
    CHECK(std::abs(sample_variance(draws.col(j)) - 1.0) < 0.02);
  }
  CHECK_THROWS_AS(refresh_velocity(rng, 0, VelocitySpace::Gaussian), DomainError);
  CHECK(parse_velocity_space("unit-sphere") == VelocitySpace::UnitSphere);
  CHECK_THROWS_AS(parse_velocity_space("hyperbolic"), DomainError);
}

TEST_CASE("boundary hit times") {
  const std::vector<std::optional<double>> b1{0.0};
  const auto h = boundary_hit_time(vec({2}), vec({-1}), b1);
  REQUIRE(h);
  CHECK(h->time == 2.0);
  CHECK(h->index == 0);
  CHECK_FALSE(boundary_hit_time(vec({2}), vec({1}), b1));
  const std::vector<std::optional<double>> b2{0.0, 0.0};
  const auto h2 = boundary_hit_time(vec({1, 3}), vec({-2, -1}), b2);
  REQUIRE(h2);
  CHECK(h2->time == 0.5);
  CHECK(h2->index == 0);
  const std::vector<std::optional<double>> b3{std::nullopt, 0.0};
  CHECK_FALSE(boundary_hit_time(vec({-5, 1}), vec({-1, 1}), b3));
  CHECK_THROWS_AS(boundary_hit_time(vec({-1}), vec({1}), b1), DomainError);
}

TEST_CASE("event queue discipline") {
  LocalEventQueue q(5);
  for (std::size_t i = 0; i < 5; ++i) q.set(i, 10.0 - i);
  CHECK(q.top() == 4);
  q.set(4, 20.0);
  CHECK(q.top() == 3);
  q.set(1, 7.0);
  q.set(2, 7.0);
  CHECK(q.top() == 1);  // tie: smallest id
  q.set(0, 7.0);
  CHECK(q.top() == 0);
  CHECK(q.top_time() == 7.0);
  q.set(0, kInfinity);
  q.set(1, kInfinity);
  CHECK(q.top() == 2);

  // Against a linear scan under random updates.
  Rng rng(3);
  LocalEventQueue r(17);
  std::vector<double> ref(17, kInfinity);
  for (int step = 0; step < 5000; ++step) {
    const auto id = static_cast<std::size_t>(rng.uniform() * 17);
    const double t = std::floor(rng.uniform() * 20);
    r.set(id, t);
    ref[id] = t;
    std::size_t best = 0;
    for (std::size_t i = 1; i < 17; ++i)
      if (ref[i] < ref[best]) best = i;
    CHECK(r.top() == best);
  }
}

TEST_CASE("Zig-Zag on a standard normal") {
  const GaussianModel model(1);
  Rng rng(4);
  Tuning tuning;
  const Skeleton sk = run_zigzag(model, at_origin(1), 100000, tuning, rng);
  CHECK(sk.counters.events == 100000);
  CHECK(sk.counters.shadow_events == 0);
  CHECK(sk.duration() > 1e5);
  check_linear_dynamics(sk);
  for (std::size_t i = 0; i < sk.size(); ++i) CHECK(std::abs(sk.velocity(i)(0)) == 1.0);
  const Eigen::MatrixXd samples = discretize(sk, 100000);
  CHECK(std::abs(sample_variance(samples.col(0)) - 1.0) < 0.05);
  CHECK(std::abs(path_integral_mean(sk, PathFunction::Square, 0) - 1.0) < 0.05);
  CHECK_THROWS_AS(run_zigzag(model, {0.0, VectorXd::Zero(1), vec({0.5})}, 10, tuning, rng),
                  DomainError);
}

TEST_CASE("Zig-Zag equals the local sampler with singleton factors") {
  const BananaModel model(1.0);
  Tuning tuning;
  tuning.adaptive_horizon = true;
  Rng a(5), b(5);
  const Skeleton z = run_zigzag(model, at_origin(2), 2000, tuning, a);
  Tuning zz = tuning;
  zz.velocity_space = VelocitySpace::ZigZag;
  const Skeleton l = run_local(model, Factorisation::singletons(model), LocalKernel::FlipAll,
                               at_origin(2), 2000, zz, b);
  REQUIRE(z.size() == l.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(std::abs(z.time(i) - l.time(i)) <= 1e-9);
    CHECK((z.position(i) - l.position(i)).cwiseAbs().maxCoeff() <= 1e-9);
  }
  check_linear_dynamics(z);
}

TEST_CASE("global BPS equals the local sampler with one factor") {
  const PoissonFieldModel model(vec({0, 2, 1}));
  Tuning tuning;
  tuning.refresh_rate = 1.0;
  Rng a(6), b(6);
  const Skeleton g = run_bps_global(model, at_origin(3), 1.0, 1500, tuning, a);
  const Skeleton l = run_local(model, Factorisation::single(model), LocalKernel::ReflectSubset,
                               at_origin(3), 1500, tuning, b);
  REQUIRE(g.size() == l.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(g.time(i) - l.time(i)) <= 1e-9);
    CHECK((g.position(i) - l.position(i)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((g.velocity(i) - l.velocity(i)).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("BPS on an isotropic Gaussian") {
  const GaussianModel model(2);
  Rng rng(7);
  Tuning tuning;
  tuning.adaptive_horizon = true;
  const Skeleton sk = run_bps_global(model, at_origin(2), 1.0, 200000, tuning, rng);
  check_linear_dynamics(sk);
  const Eigen::MatrixXd samples = discretize(sk, 100000);
  for (Index j = 0; j < 2; ++j) {
    CHECK(std::abs(samples.col(j).mean()) < 0.05);
    CHECK(std::abs(sample_variance(samples.col(j)) - 1.0) < 0.05);
  }
  // Reflections negate the directional derivative.
  for (std::size_t i = 1; i < sk.size(); ++i) {
    if (sk.kind(i) != EventKind::Event) continue;
    const VectorXd grad = model.gradient(sk.position(i));
    CHECK(std::abs(sk.velocity(i).dot(grad) + sk.velocity(i - 1).dot(grad)) <= 1e-9);
  }
  Rng r2(1);
  const Skeleton none = run_bps_global(model, at_origin(2), 0.0, 10, tuning, r2);
  CHECK_FALSE(none.warnings.empty());
  CHECK_THROWS_AS(run_bps_global(model, at_origin(2), -1.0, 10, tuning, r2), DomainError);
}

TEST_CASE("local BPS on a chain re-simulates few factors per event") {
  const Index p = 64;
  const PoissonAr1Model model(PoissonAr1Model::simulate_data(p, 0.5, 8), 0.5);
  Tuning tuning;
  tuning.adaptive_horizon = true;
  tuning.refresh_rate = 1.0;
  for (Index block : {1, 4, 16}) {
    const Factorisation fact = Factorisation::chain_blocks(model, block);
    for (std::size_t f = 0; f < fact.size(); ++f) {
      CHECK(fact.neighbours[f].size() <= 3);
      CHECK(std::find(fact.neighbours[f].begin(), fact.neighbours[f].end(), f) !=
            fact.neighbours[f].end());
    }
    Rng rng(9);
    const Skeleton sk =
        run_local(model, fact, LocalKernel::ReflectSubset, at_origin(p), 5000, tuning, rng);
    check_linear_dynamics(sk);
    // Each event rebuilds the neighbours other than the firing factor.
    const double per_event = static_cast<double>(sk.counters.resimulations) /
                             static_cast<double>(sk.counters.events + sk.counters.refreshes);
    CHECK(per_event <= 3.0);
  }
  CHECK_THROWS_AS(Factorisation::build(model, {{0, 1}}), DomainError);
}

TEST_CASE("tau_max does not change the invariant law") {
  // Banana with kappa = 1: theta_1 ~ N(1, 1/2) and E[theta_2] = E[theta_1^2] = 3/2.
  const BananaModel model(1.0);
  for (int mode = 0; mode < 3; ++mode) {
    CAPTURE(mode);
    Tuning tuning;
    tuning.tau_max = mode == 0 ? 0.1 : 1.0;
    tuning.adaptive_horizon = mode == 2;
    Rng rng(10 + mode);
    const Skeleton sk = run_zigzag(model, at_origin(2), 200000, tuning, rng);
    CHECK(sk.counters.shadow_events > 0);
    check_linear_dynamics(sk);
    CHECK(std::abs(path_integral_mean(sk, PathFunction::Coordinate, 0) - 1.0) < 0.05);
    CHECK(std::abs(path_integral_mean(sk, PathFunction::Square, 0) - 1.5) < 0.08);
    CHECK(std::abs(path_integral_mean(sk, PathFunction::Coordinate, 1) - 1.5) < 0.1);
  }
}

TEST_CASE("bounded targets stay inside their domain") {
  const GaussianModel half(1, 1.0, true);
  Tuning tuning;
  tuning.adaptive_horizon = true;
  Rng rng(11);
  const Skeleton sk = run_zigzag(half, {0.0, vec({1.0}), VectorXd()}, 50000, tuning, rng);
  CHECK(sk.counters.boundary_hits > 0);
  for (std::size_t i = 0; i < sk.size(); ++i) CHECK(sk.position(i)(0) >= -1e-9);
  // Half-normal mean sqrt(2 / pi).
  CHECK(std::abs(path_integral_mean(sk, PathFunction::Coordinate, 0) - std::sqrt(2 / M_PI)) < 0.03);
  CHECK_THROWS_AS(run_zigzag(half, {0.0, vec({-1.0}), VectorXd()}, 10, tuning, rng), DomainError);
}

TEST_CASE("superposition thinning") {
  const ClockTerm one = ClockTerm::affine(1.0, 0.0);
  const ClockTerm half_neg = ClockTerm::affine(-0.5, 0.0);
  const ClockTerm neg = ClockTerm::affine(-1.0, 0.0);
  const ClockTerm a[] = {one, half_neg};
  CHECK(superposition_acceptance(a, 0.3) == doctest::Approx(0.5));
  const ClockTerm b[] = {one, ClockTerm::exponential(2.0, 0.5)};
  CHECK(superposition_acceptance(b, 1.0) == 1.0);
  const ClockTerm c[] = {one, neg};
  CHECK(superposition_acceptance(c, 2.0) == 0.0);
  const ClockTerm d[] = {neg, ClockTerm::exponential(-1.0, 1.0)};
  Rng rng(12);
  CHECK_FALSE(superposition_event(d, rng).outcome.is_event());

  // Law of the first event for 1 + 2 e^{t}.
  const ClockTerm e[] = {one, ClockTerm::exponential(2.0, 1.0)};
  std::vector<double> times;
  for (int i = 0; i < 50000; ++i) times.push_back(superposition_event(e, rng).outcome.time);
  CHECK(oracle::ks_distance(times, [](double t) { return -std::expm1(-(t + 2 * std::expm1(t))); }) <
        0.02);
}

TEST_CASE("superposition baseline samples the Poisson field posterior") {
  const VectorXd y = vec({0, 3});
  const PoissonFieldModel model(y);
  Tuning cc, sp;
  cc.adaptive_horizon = sp.adaptive_horizon = true;
  sp.method = ThinningMethod::Superposition;
  Rng a(13), b(14);
  const Skeleton s1 = run_bps_global(model, at_origin(2), 1.0, 100000, cc, a);
  const Skeleton s2 = run_bps_global(model, at_origin(2), 1.0, 100000, sp, b);
  // Posterior mean of each coordinate by quadrature.
  for (Index k = 0; k < 2; ++k) {
    const auto dens = [&](double x) { return std::exp(-(0.5 * x * x + std::exp(x) - y(k) * x)); };
    const double z = oracle::simpson(dens, -10, 10, 20000);
    const double mean = oracle::simpson([&](double x) { return x * dens(x); }, -10, 10, 20000) / z;
    CHECK(std::abs(path_integral_mean(s1, PathFunction::Coordinate, k) - mean) < 0.05);
    CHECK(std::abs(path_integral_mean(s2, PathFunction::Coordinate, k) - mean) < 0.05);
  }
  CHECK(efficiency({s1.counters.events, s1.counters.shadow_events}) >
        efficiency({s2.counters.events, s2.counters.shadow_events}) - 0.2);
}
