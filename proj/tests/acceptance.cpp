// Acceptance run: one PASS/FAIL line per criterion.
//
// Usage: acceptance [--threads N] [--out DIR] [--allow-fail 1,2,...]
// The exit status counts failing criteria that are not listed in --allow-fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ccpdmp/cc_envelope.hpp"
#include "ccpdmp/config.hpp"
#include "ccpdmp/estimation.hpp"
#include "ccpdmp/experiments.hpp"
#include "ccpdmp/kernels.hpp"
#include "ccpdmp/models.hpp"
#include "ccpdmp/poisson_clock.hpp"
#include "ccpdmp/samplers.hpp"
#include "support.hpp"

using namespace ccpdmp;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int digits = 3) {
  std::ostringstream s;
  s.precision(digits);
  s << std::fixed << x;
  return s.str();
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// ---- 1: logistic efficiency table ----

Verdict table1(const ExperimentContext& ctx) {
  const double published[3][7] = {{0.53, 0.50, 0.45, 0.39, 0.34, 0.27, 0.15},
                                  {0.80, 0.80, 0.79, 0.78, 0.76, 0.71, 0.46},
                                  {0.82, 0.82, 0.82, 0.82, 0.81, 0.79, 0.62}};
  const LogisticOptions opt;
  const auto cells = summarise_logistic(logistic_experiment(opt, ctx));
  double worst = 0.0;
  std::string worst_at;
  std::ostringstream table;
  for (const auto& c : cells) {
    const int i = c.order - 1;
    const auto j = std::find(opt.rhos.begin(), opt.rhos.end(), c.rho) - opt.rhos.begin();
    const double err = std::abs(c.mean_efficiency - published[i][j]);
    if (err > worst) {
      worst = err;
      worst_at = "order " + std::to_string(c.order) + " rho " + fmt(c.rho, 2);
    }
    table << (j == 0 ? (i ? "; " : "") + std::to_string(c.order) + ":" : "") << " "
          << fmt(c.mean_efficiency, 2);
  }
  return {worst <= 0.05, "max |diff| " + fmt(worst) + " at " + worst_at + " [" + table.str() + "]"};
}

// ---- 2: banana efficiency against tau_max ----

Verdict banana_shape(const ExperimentContext& ctx) {
  BananaOptions opt;
  opt.n_events = 10000;
  const auto rows = banana_experiment(opt, ctx);
  std::vector<double> grid, eff;
  double adaptive = 0.0;
  for (const auto& r : rows) {
    if (r.mode == "fixed") {
      grid.push_back(r.tau_max);
      eff.push_back(r.efficiency);
    } else {
      adaptive = r.efficiency;
    }
  }
  const auto best = std::max_element(eff.begin(), eff.end()) - eff.begin();
  const bool interior = best > 0 && best + 1 < static_cast<long>(eff.size()) &&
                        eff.front() < eff[best] && eff.back() < eff[best];
  const bool adapt = adaptive >= 0.8 * eff[best];
  return {interior && adapt, "peak " + fmt(eff[best]) + " at tau_max " + fmt(grid[best], 1) +
                                 ", ends " + fmt(eff.front()) + "/" + fmt(eff.back()) +
                                 ", adaptive " + fmt(adaptive)};
}

// ---- 3: CC against superposition as the dimension grows ----

Verdict superposition_trend(const ExperimentContext& ctx) {
  SuperpositionOptions opt;
  opt.n_events = 1000;
  opt.reps = 5;
  const auto rows = superposition_experiment(opt, ctx);
  std::map<std::pair<std::string, Index>, std::vector<double>> eff;
  for (const auto& r : rows) eff[{r.method, r.dim}].push_back(r.efficiency);
  const auto cc = [&](Index d) { return mean_of(eff[{"cc", d}]); };
  const auto sup = [&](Index d) { return mean_of(eff[{"superposition", d}]); };
  const Index lo = opt.dims.front(), hi = opt.dims.back();
  bool pass = cc(hi) >= 0.9 * cc(lo);
  std::ostringstream d;
  d << "cc " << fmt(cc(lo)) << " -> " << fmt(cc(hi)) << " (dims " << lo << ".." << hi << ");";
  for (Index dim : opt.dims) {
    if (dim < 16) continue;
    pass = pass && cc(dim) > sup(dim);
    d << " " << dim << ": " << fmt(cc(dim), 2) << ">" << fmt(sup(dim), 2);
  }
  return {pass, d.str()};
}

// ---- 4: local factorisations against global BPS ----

Verdict locality(const ExperimentContext& ctx) {
  ScalingOptions opt;
  opt.reps = 3;
  const auto rows = scaling_experiment(opt, ctx);
  std::map<std::string, std::map<Index, std::vector<double>>> resim, speed;
  for (const auto& r : rows) {
    resim[r.sampler][r.dim].push_back(r.resimulations_per_event);
    speed[r.sampler][r.dim].push_back(r.events_per_second);
  }
  bool pass = true;
  std::ostringstream d;
  for (const auto& [sampler, by_dim] : resim) {
    if (sampler == "bps") continue;
    std::vector<double> rs, sp;
    for (const auto& [dim, xs] : by_dim) {
      rs.push_back(mean_of(xs));
      sp.push_back(median_of(speed[sampler][dim]));
    }
    const double r_ratio = *std::max_element(rs.begin(), rs.end()) / *std::min_element(rs.begin(), rs.end());
    const double s_ratio = *std::max_element(sp.begin(), sp.end()) / *std::min_element(sp.begin(), sp.end());
    pass = pass && r_ratio <= 1.5 && s_ratio < 2.0;
    d << sampler << " resim x" << fmt(r_ratio, 2) << " speed x" << fmt(s_ratio, 2) << "; ";
  }
  double prev = std::numeric_limits<double>::infinity();
  d << "bps ev/s";
  for (const auto& [dim, xs] : speed["bps"]) {
    const double s = median_of(xs);
    pass = pass && s < prev;
    prev = s;
    d << " " << static_cast<long>(s);
  }
  return {pass, d.str()};
}

// ---- 5: distributional exactness ----

struct Moment {
  double estimate = 0.0;
  double se = 0.0;
};

// Discretized mean of g with a standard error from the ESS of the series.
Moment moment(const MatrixXd& samples, Index j, const std::function<double(double)>& g) {
  VectorXd x = samples.col(j).unaryExpr(g);
  const double m = x.mean();
  const double var = (x.array() - m).square().sum() / static_cast<double>(x.size() - 1);
  return {m, std::sqrt(var / ess(x))};
}

Skeleton run(const std::string& text, std::uint64_t seed) {
  RunConfig c = parse_config(text);
  const ModelPtr m = make_model(c);
  Rng rng(seed);
  return run_sampler(*m, c, rng);
}

Verdict exactness(const ExperimentContext& ctx) {
  std::ostringstream d;
  bool pass = true;

  // (a) Zig-Zag on N(0, 1).
  const Skeleton zz = run("model = gaussian\nsampler = zigzag\nn_events = 100000\n", ctx.seed);
  const MatrixXd zs = discretize(zz, 100000);
  const double zm = zs.col(0).mean();
  const double zv = (zs.col(0).array() - zm).square().mean();
  const bool a = zz.time(zz.size() - 1) >= 1e5 && std::abs(zm) < 0.02 && std::abs(zv - 1.0) <= 0.05 &&
                 zz.counters.shadow_events == 0;
  pass = pass && a;
  d << "(a) T " << static_cast<long>(zz.time(zz.size() - 1)) << " mean " << fmt(zm) << " var "
    << fmt(zv) << " shadows " << zz.counters.shadow_events << (a ? "" : " FAIL") << "; ";

  // (b) banana, kappa = 1, against nested Simpson quadrature of exp(-U).
  const BananaModel banana(1.0);
  const auto density = [&](double x, double y) {
    VectorXd th(2);
    th << x, y;
    return std::exp(-banana.potential(th));
  };
  const auto quad = [&](const std::function<double(double, double)>& g) {
    return oracle::simpson(
        [&](double x) {
          return oracle::simpson([&](double y) { return g(x, y) * density(x, y); }, x * x - 8.0,
                                 x * x + 8.0, 400);
        },
        -6.0, 8.0, 1400);
  };
  const double z = quad([](double, double) { return 1.0; });
  const std::vector<std::pair<const char*, std::function<double(double, double)>>> fns{
      {"E t1", [](double x, double) { return x; }},
      {"E t2", [](double, double y) { return y; }},
      {"E t1^2", [](double x, double) { return x * x; }},
      {"E t2^2", [](double, double y) { return y * y; }}};
  const Skeleton bs = run("model = banana\nsampler = zigzag\ntau_mode = adaptive\nn_events = 400000\n",
                          ctx.seed + 1);
  const MatrixXd bsamp = discretize(bs, 100000);
  d << "(b)";
  for (std::size_t i = 0; i < fns.size(); ++i) {
    const double truth = quad(fns[i].second) / z;
    const Index j = i % 2;
    const Moment m = moment(bsamp, j, i < 2 ? std::function<double(double)>([](double x) { return x; })
                                            : [](double x) { return x * x; });
    const double zscore = std::abs(m.estimate - truth) / m.se;
    pass = pass && zscore < 3.0;
    d << " " << fns[i].first << " " << fmt(m.estimate) << " vs " << fmt(truth) << " (" << fmt(zscore, 1)
      << " se)";
  }
  d << "; ";

  // (c) GIG, density x^-2 exp(-x - 1/x) on x > 0.
  const auto gig = [](double x) { return x > 0.0 ? std::exp(-x - 1.0 / x) / (x * x) : 0.0; };
  const double gz = oracle::simpson(gig, 0.0, 60.0, 200000);
  const double gm = oracle::simpson([&](double x) { return x * gig(x); }, 0.0, 60.0, 200000) / gz;
  const Skeleton gs = run("model = gig\nsampler = zigzag\ntau_mode = adaptive\nn_events = 200000\n",
                          ctx.seed + 2);
  const Moment m = moment(discretize(gs, 100000), 0, [](double x) { return x; });
  const double zscore = std::abs(m.estimate - gm) / m.se;
  pass = pass && zscore < 3.0;
  d << "(c) mean " << fmt(m.estimate, 4) << " vs " << fmt(gm, 4) << " (" << fmt(zscore, 1) << " se)";
  return {pass, d.str()};
}

// ---- 6: Poisson clock law ----

Verdict clock_law(const ExperimentContext& ctx) {
  struct Case {
    const char* name;
    PiecewiseLinearRate rate;
    std::function<double(double)> lambda;
  };
  const std::vector<Case> cases{
      {"2", PiecewiseLinearRate({{0.0, 10.0, 2.0, 0.0}}), [](double t) { return 2.0 * t; }},
      {"2t", PiecewiseLinearRate({{0.0, 10.0, 0.0, 2.0}}), [](double t) { return t * t; }},
      {"max(0,t-1)", PiecewiseLinearRate({{0.0, 3.0, -1.0, 1.0}}),
       [](double t) { return t > 1 ? 0.5 * (t - 1) * (t - 1) : 0.0; }},
  };
  Rng rng(ctx.seed);
  const auto ks = [](const std::vector<double>& xs, const std::function<double(double)>& lambda,
                     double horizon) {
    const double total = lambda(horizon);
    return oracle::ks_distance(xs, [&](double t) { return -std::expm1(-lambda(t)) / -std::expm1(-total); });
  };
  bool pass = true;
  std::ostringstream d;
  d << "KS";
  for (const auto& c : cases) {
    std::vector<double> times;
    while (times.size() < 100000) {
      const ClockOutcome o = first_arrival(c.rate, rng);
      if (o.is_event()) times.push_back(o.time);
    }
    const double dist = ks(times, c.lambda, c.rate.horizon());
    pass = pass && dist < 0.02;
    d << " " << c.name << ": " << fmt(dist, 4);
  }
  CCFunction affine{[](double t) { return 1.0 + t; }, [](double) { return 0.0; },
                    [](double) { return 0.0; }, 2.0};
  std::vector<double> times;
  while (times.size() < 100000) {
    const ThinningResult r = cc_first_event(affine, Abscissae::endpoints(affine), rng);
    if (r.outcome.is_event()) times.push_back(r.outcome.time);
  }
  const double dist = ks(times, [](double t) { return t + 0.5 * t * t; }, 2.0);
  pass = pass && dist < 0.02;
  d << " cc 1+t: " << fmt(dist, 4);
  return {pass, d.str()};
}

// ---- 7: envelope and sampler properties ----

struct Tally {
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string first;
  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok && failures++ == 0) first = what;
  }
};

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

CCFunction make_cc(ScalarFunction fu, ScalarFunction fn, ScalarFunction dfn, double horizon) {
  return CCFunction{std::move(fu), std::move(fn), std::move(dfn), horizon};
}

void envelope_properties(Tally& tally) {
  const std::vector<CCFunction> cases{
      make_cc([](double t) { return std::exp(2 * t) - 1; }, [](double t) { return -std::exp(-t); },
              [](double t) { return std::exp(-t); }, 2.0),
      make_cc([](double t) { return std::cosh(t - 1); }, [](double t) { return std::log1p(t); },
              [](double t) { return 1.0 / (1.0 + t); }, 3.0),
      make_cc([](double t) { return std::exp(t); }, [](double t) { return -t * t; },
              [](double t) { return -2 * t; }, 2.0),
  };
  for (const auto& cc : cases) {
    Abscissae abs = Abscissae::endpoints(cc);
    for (double frac : {0.15, 0.45, 0.6, 0.8, 0.97}) {
      const double tau = frac * cc.horizon;
      const double before = build_envelope(cc, abs).value(tau);
      abs = refine(cc, abs, tau);
      const Envelope env = build_envelope(cc, abs);
      tally.check(std::abs(env.value(tau) - cc.bound(tau)) <= 1e-9, "refinement is tight");
      tally.check(env.value(tau) <= before + 1e-9, "refinement tightens");
      for (double t : oracle::grid(abs.front(), abs.back() * (1 - 1e-12), 400))
        tally.check(env.value(t) >= cc.bound(t) - 1e-8, "envelope dominates");
    }
  }
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double proposal = 5 * rng.uniform();
    const double target = proposal * (2 * rng.uniform() - 1);
    const double a = acceptance_ratio(target, proposal);
    tally.check(a >= 0.0 && a <= 1.0, "acceptance ratio in [0, 1]");
  }
}

void reflection_properties(Tally& tally) {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const VectorXd v = refresh_velocity(rng, 6, VelocitySpace::Gaussian);
    const VectorXd g = refresh_velocity(rng, 6, VelocitySpace::Gaussian);
    const VectorXd r = reflect_full(v, g);
    tally.check((reflect_full(r, g) - v).norm() <= 1e-12 * (1 + v.norm()), "reflection involution");
    tally.check(std::abs(r.norm() - v.norm()) <= 1e-12 * (1 + v.norm()), "reflection isometry");
    const std::vector<Index> subset{1, 3, 4};
    const VectorXd s = reflect_subset(v, g, subset);
    tally.check((reflect_subset(s, g, subset) - v).norm() <= 1e-12 * (1 + v.norm()),
                "subset reflection involution");
    tally.check(std::abs(s.norm() - v.norm()) <= 1e-12 * (1 + v.norm()), "subset reflection isometry");
    tally.check(flip(flip(v, 2), 2) == v, "flip involution");
  }
}

void model_properties(Tally& tally) {
  GLMData glm = logistic_experiment_data(0.5, 3, 50);
  const std::vector<std::pair<std::shared_ptr<Model>, std::vector<std::vector<Index>>>> models{
      {std::make_shared<GaussianModel>(3, 2.0), {{0}, {1, 2}}},
      {std::make_shared<GaussianModel>(2, 1.0, true), {{0}, {1}}},
      {std::make_shared<BananaModel>(1.5), {{0}, {1}, {0, 1}}},
      {std::make_shared<GlmModel>(glm, 1), {{0}, {0, 1, 2, 3, 4}}},
      {std::make_shared<GlmModel>(glm, 2), {{1}, {3}}},
      {std::make_shared<GlmModel>(glm, 3), {{2}, {4}}},
      {std::make_shared<PoissonFieldModel>(vec({0, 1, 3, 2})), {{0}, {0, 1, 2, 3}}},
      {std::make_shared<PoissonAr1Model>(vec({0, 1, 3, 2, 1}), 0.5), {{0}, {2}, {1, 2}}},
      {std::make_shared<GigModel>(), {{0}}},
      {std::make_shared<GammaModel>(2.5, 1.5), {{0}}},
  };
  Rng rng(5);
  for (const auto& [model, factor_sets] : models) {
    const Model& m = *model;
    const Index p = m.dimension();
    for (int trial = 0; trial < 30; ++trial) {
      VectorXd theta(p), v(p);
      double horizon = 0.1 + 0.9 * rng.uniform();
      for (Index k = 0; k < p; ++k) {
        theta(k) = rng.normal();
        v(k) = rng.normal();
        if (m.lower_bound(k)) {
          theta(k) = 0.3 + 2.0 * rng.uniform();
          if (v(k) < 0) horizon = std::min(horizon, 0.9 * theta(k) / -v(k));
        }
      }
      const VectorXd g = m.gradient(theta);
      for (Index k = 0; k < p; ++k) {
        VectorXd xp = theta, xm = theta;
        xp(k) += 1e-6;
        xm(k) -= 1e-6;
        tally.check(oracle::close(g(k), (m.potential(xp) - m.potential(xm)) / 2e-6, 1e-6),
                    m.name() + ": gradient against finite differences");
      }
      for (const auto& coords : factor_sets) {
        const CCFunction cc = m.rate(theta, v, coords, horizon);
        const double h = horizon / 100;
        for (int i = 1; i < 100; ++i) {
          const double t = i * h;
          const VectorXd x = theta + t * v;
          double fd = 0.0;
          for (Index k : coords) {
            VectorXd xp = x, xm = x;
            xp(k) += 1e-5;
            xm(k) -= 1e-5;
            fd += v(k) * (m.potential(xp) - m.potential(xm)) / 2e-5;
          }
          tally.check(oracle::close(cc.target(t), fd, 1e-6), m.name() + ": rate against finite differences");
          tally.check(cc.bound(t) >= cc.target(t) - 1e-8, m.name() + ": bound dominates rate");
          tally.check(oracle::second_diff(cc.eval_convex, t, h) >= -1e-8, m.name() + ": convex part");
          tally.check(oracle::second_diff(cc.eval_concave, t, h) <= 1e-8, m.name() + ": concave part");
        }
      }
    }
  }
}

void equivalence_properties(Tally& tally) {
  const auto same = [&](const Skeleton& a, const Skeleton& b, const std::string& what) {
    tally.check(a.size() == b.size(), what + ": skeleton length");
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      tally.check(std::abs(a.time(i) - b.time(i)) <= 1e-9, what + ": event times");
      tally.check((a.position(i) - b.position(i)).cwiseAbs().maxCoeff() <= 1e-9, what + ": positions");
    }
  };
  {
    const BananaModel model(1.0);
    Tuning tuning;
    tuning.adaptive_horizon = true;
    Rng a(5), b(5);
    const PDMPState s0{0.0, VectorXd::Zero(2), VectorXd()};
    const Skeleton z = run_zigzag(model, s0, 2000, tuning, a);
    tuning.velocity_space = VelocitySpace::ZigZag;
    same(z, run_local(model, Factorisation::singletons(model), LocalKernel::FlipAll, s0, 2000, tuning, b),
         "zigzag vs local singletons");
  }
  {
    const PoissonFieldModel model(vec({0, 2, 1}));
    Tuning tuning;
    tuning.refresh_rate = 1.0;
    Rng a(6), b(6);
    const PDMPState s0{0.0, VectorXd::Zero(3), VectorXd()};
    same(run_bps_global(model, s0, 1.0, 1500, tuning, a),
         run_local(model, Factorisation::single(model), LocalKernel::ReflectSubset, s0, 1500, tuning, b),
         "global vs one-factor local BPS");
  }
}

Verdict properties(const ExperimentContext&) {
  Tally tally;
  envelope_properties(tally);
  reflection_properties(tally);
  model_properties(tally);
  equivalence_properties(tally);
  std::string d = std::to_string(tally.checks) + " checks, " + std::to_string(tally.failures) + " failed";
  if (tally.failures) d += " (first: " + tally.first + ")";
  return {tally.failures == 0, d};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  ExperimentContext ctx;
  ctx.threads = std::max(1u, std::thread::hardware_concurrency());
  std::string out = (fs::temp_directory_path() / "ccpdmp_acceptance").string();
  std::vector<int> allowed;
  std::vector<int> only;
  app.add_option("--threads", ctx.threads)->check(CLI::PositiveNumber);
  app.add_option("--seed", ctx.seed);
  app.add_option("--out", out);
  app.add_option("--allow-fail", allowed)->delimiter(',');
  app.add_option("--only", only)->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(out);
  ctx.out = out;

  const std::vector<std::pair<const char*, std::function<Verdict(const ExperimentContext&)>>> criteria{
      {"logistic efficiency table", table1},
      {"banana efficiency against tau_max", banana_shape},
      {"cc against superposition by dimension", superposition_trend},
      {"locality of factorised samplers", locality},
      {"distributional exactness", exactness},
      {"Poisson clock law", clock_law},
      {"envelope and sampler properties", properties},
  };
  const std::set<int> allow(allowed.begin(), allowed.end());
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), n) == only.end()) continue;
    Verdict v;
    const double secs = timed([&] {
      try {
        v = criteria[i].second(ctx);
      } catch (const std::exception& e) {
        v = {false, std::string("error: ") + e.what()};
      }
    });
    std::printf("criterion %d %s: %s (%s) [%.0fs]\n", n, criteria[i].first, v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass && !allow.count(n)) ++unexpected;
  }
  return unexpected;
}
