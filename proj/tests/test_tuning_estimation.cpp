#include "doctest.h"

#include <cmath>
#include <vector>

#include "ccpdmp/errors.hpp"
#include "ccpdmp/estimation.hpp"
#include "ccpdmp/random.hpp"
#include "ccpdmp/tuning.hpp"
#include "support.hpp"

using namespace ccpdmp;

namespace {

Skeleton path(std::vector<std::pair<double, double>> knots) {
  Skeleton sk(1, {});
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const double v = i + 1 < knots.size() ? (knots[i + 1].second - knots[i].second) /
                                                (knots[i + 1].first - knots[i].first)
                                          : 0.0;
    sk.push(knots[i].first, VectorXd::Constant(1, knots[i].second), VectorXd::Constant(1, v),
            EventKind::Event);
  }
  return sk;
}

}  // namespace

TEST_CASE("nearest-rank percentile") {
  std::vector<double> xs;
  for (int i = 1; i <= 100; ++i) xs.push_back(i / 100.0);
  CHECK(nearest_rank_percentile(xs, 80) == doctest::Approx(0.80));
  CHECK(nearest_rank_percentile({3.0, 1.0, 2.0}, 50) == 2.0);
  CHECK(nearest_rank_percentile({3.0, 1.0, 2.0}, 100) == 3.0);
  CHECK_THROWS_AS(nearest_rank_percentile({}, 50), DomainError);
  CHECK_THROWS_AS(nearest_rank_percentile({1.0}, 0), DomainError);
}

TEST_CASE("adaptive horizon updates every window") {
  AdaptiveHorizon h(1.0, 80, 100);
  for (int i = 1; i <= 99; ++i) CHECK_FALSE(h.update(i / 100.0));
  CHECK(h.current() == 1.0);
  CHECK(h.update(1.0));
  CHECK(h.current() == doctest::Approx(0.80));
  CHECK(h.buffered() <= 100);

  AdaptiveHorizon c(1.0, 80, 10);
  for (int i = 0; i < 10; ++i) c.update(0.3);
  CHECK(c.current() == 0.3);

  AdaptiveHorizon f = AdaptiveHorizon::fixed(0.5);
  for (int i = 0; i < 300; ++i) CHECK_FALSE(f.update(2.0));
  CHECK(f.current() == 0.5);
  CHECK_THROWS_AS(h.update(0.0), DomainError);
  CHECK_THROWS_AS(h.update(-1.0), DomainError);
  CHECK_THROWS_AS(AdaptiveHorizon(0.0), DomainError);
}

TEST_CASE("efficiency") {
  CHECK(efficiency({80, 20}) == doctest::Approx(0.8));
  CHECK(efficiency({7, 0}) == 1.0);
  CHECK(efficiency({0, 7}) == 0.0);
  CHECK(efficiency({3, 5}) == efficiency({30, 50}));
  CHECK_THROWS_AS(efficiency({0, 0}), DomainError);
}

TEST_CASE("discretize") {
  const Skeleton sk = path({{0, 0}, {2, 2}});
  const Eigen::MatrixXd s = discretize(sk, 2);
  REQUIRE(s.rows() == 2);
  CHECK(s(0, 0) == doctest::Approx(1.0));
  CHECK(s(1, 0) == doctest::Approx(2.0));
  const Eigen::MatrixXd one = discretize(sk, 1);
  CHECK(one.rows() == 1);
  CHECK(one(0, 0) == doctest::Approx(2.0));

  const Skeleton zig = path({{0, 0}, {1, 1}, {3, -1}, {3.5, 0.5}});
  const Eigen::MatrixXd z = discretize(zig, 7);
  for (Index j = 0; j < 7; ++j) {
    const double t = 3.5 * (j + 1) / 7.0;
    CHECK(z(j, 0) == doctest::Approx(zig.position_at(t, 0)));
  }
  CHECK_THROWS_AS(discretize(path({{0, 0}}), 3), DomainError);
  CHECK_THROWS_AS(discretize(sk, 0), DomainError);
}

TEST_CASE("path integrals") {
  const Skeleton ramp = path({{0, 0}, {2, 2}});
  CHECK(path_integral_mean(ramp, PathFunction::Coordinate, 0) == doctest::Approx(1.0));
  CHECK(path_integral_mean(ramp, PathFunction::Square, 0) == doctest::Approx(4.0 / 3.0));
  const Skeleton tent = path({{0, 0}, {1, 1}, {2, 0}});
  CHECK(path_integral_mean(tent, PathFunction::Coordinate, 0) == doctest::Approx(0.5));

  // Discretized means converge at O(1/M).
  const Skeleton zig = path({{0, 0.5}, {1, 2}, {3, -1}, {3.5, 0.25}});
  const double exact = path_integral_mean(zig, PathFunction::Square, 0);
  for (Index m : {100, 1000, 10000}) {
    const Eigen::MatrixXd s = discretize(zig, m);
    CHECK(std::abs(s.col(0).array().square().mean() - exact) < 20.0 / m);
  }
}

TEST_CASE("effective sample size") {
  Rng rng(1);
  const int n = 100000;
  std::vector<double> iid(n), ar(n);
  double x = 0.0;
  for (int i = 0; i < n; ++i) {
    iid[i] = rng.normal();
    x = 0.5 * x + std::sqrt(0.75) * rng.normal();
    ar[i] = x;
  }
  const double r_iid = ess(iid) / n;
  CHECK(r_iid >= 0.9);
  CHECK(r_iid <= 1.1);
  CHECK(std::abs(ess(ar) / n - 1.0 / 3.0) < 0.05);
  CHECK_THROWS_AS(ess(std::vector<double>(100, 2.0)), DegenerateSeriesError);
  CHECK_THROWS_AS(ess(std::vector<double>(5, 1.0)), DomainError);

  const VectorXd acf = autocorrelation(ar, 3);
  CHECK(acf(0) == doctest::Approx(1.0));
  CHECK(std::abs(acf(1) - 0.5) < 0.02);
  CHECK(std::abs(acf(2) - 0.25) < 0.02);
}
