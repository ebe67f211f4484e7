#include "ccpdmp/experiments.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>

#include "ccpdmp/errors.hpp"
#include "ccpdmp/estimation.hpp"
#include "ccpdmp/output.hpp"
#include "ccpdmp/random.hpp"

namespace ccpdmp {

namespace {

// Experiment ids mixed into every derived seed.
enum : std::uint64_t { kBanana = 1, kLogistic, kLogisticData, kSuper, kSuperData, kScaling,
                       kScalingData, kGig };

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

double ratio(std::size_t events, std::size_t shadows) {
  return efficiency({events, shadows});
}

PDMPState origin(Index dim) {
  PDMPState s;
  s.theta = VectorXd::Zero(dim);
  return s;
}

}  // namespace

double timed(const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---- banana ----

std::vector<double> default_banana_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 40; ++i) g.push_back(0.1 * i);
  return g;
}

std::vector<BananaRow> banana_experiment(const BananaOptions& opt, const ExperimentContext& ctx) {
  const std::vector<double> grid = opt.grid.empty() ? default_banana_grid() : opt.grid;
  if (opt.reps == 0) throw DomainError("banana: reps must be positive");
  for (double tau : grid)
    if (!(tau > 0.0)) throw DomainError("banana: grid values must be positive");
  const BananaModel model(opt.kappa);
  // One cell per (grid point or adaptive, rep); the adaptive cells come last.
  const std::size_t n_points = grid.size() + 1;
  const std::function<BananaRow(std::size_t)> job = [&](std::size_t i) {
    const std::size_t point = i / opt.reps;
    const std::size_t rep = i % opt.reps;
    const bool adaptive = point == grid.size();
    Tuning tuning;
    tuning.adaptive_horizon = adaptive;
    tuning.tau_max = adaptive ? 1.0 : grid[point];
    Rng rng(derive_seed(ctx.seed, {kBanana, adaptive ? 0 : bits(grid[point]), rep}));
    const Skeleton sk = run_zigzag(model, origin(2), opt.n_events, tuning, rng);
    BananaRow row;
    row.mode = adaptive ? "adaptive" : "fixed";
    row.tau_max = adaptive ? sk.horizons_used.back() : grid[point];
    row.rep = rep;
    row.events = sk.counters.events;
    row.shadow_events = sk.counters.shadow_events;
    row.efficiency = ratio(row.events, row.shadow_events);
    row.per_factor = sk.per_factor;
    return row;
  };
  return parallel_map<BananaRow>(n_points * opt.reps, ctx.threads, job);
}

void write_banana_csv(const std::filesystem::path& file, const std::vector<BananaRow>& rows) {
  CsvWriter csv(file, {"mode", "tau_max", "rep", "events", "shadow_events", "efficiency",
                       "events_theta_1", "shadow_theta_1", "events_theta_2", "shadow_theta_2"});
  for (const auto& r : rows) {
    csv.cell(r.mode).cell(r.tau_max).cell(r.rep).cell(r.events).cell(r.shadow_events)
        .cell(r.efficiency);
    for (std::size_t f = 0; f < 2; ++f) {
      const FactorCounters c = f < r.per_factor.size() ? r.per_factor[f] : FactorCounters{};
      csv.cell(c.events).cell(c.shadow_events);
    }
    csv.end_row();
  }
}

// ---- logistic ----

std::vector<LogisticRow> logistic_experiment(const LogisticOptions& opt,
                                             const ExperimentContext& ctx) {
  if (opt.reps == 0) throw DomainError("logistic: reps must be positive");
  struct Cell {
    int order;
    double rho;
    std::size_t rep;
  };
  std::vector<Cell> cells;
  for (int order : opt.orders) {
    if (order < 1 || order > 3) throw DomainError("logistic: order must be 1, 2 or 3");
    for (double rho : opt.rhos)
      for (std::size_t rep = 0; rep < opt.reps; ++rep) cells.push_back({order, rho, rep});
  }
  const std::function<LogisticRow(std::size_t)> job = [&](std::size_t i) {
    const Cell& c = cells[i];
    // The data set depends on (rho, rep) only, so every order sees the same data.
    const GLMData data =
        logistic_experiment_data(c.rho, derive_seed(ctx.seed, {kLogisticData, bits(c.rho), c.rep}),
                                 opt.n_obs);
    const GlmModel model(data, c.order);
    Tuning tuning;
    tuning.tau_max = 1.0;
    tuning.adaptive_horizon = c.order > 1;
    tuning.max_thinning_iters = opt.max_thinning_iters;
    Rng rng(derive_seed(ctx.seed, {kLogistic, static_cast<std::uint64_t>(c.order), bits(c.rho), c.rep}));
    const Skeleton sk = run_zigzag(model, origin(model.dimension()), opt.n_events, tuning, rng);
    LogisticRow row;
    row.order = c.order;
    row.rho = c.rho;
    row.rep = c.rep;
    row.events = sk.counters.events;
    row.shadow_events = sk.counters.shadow_events;
    row.efficiency = ratio(row.events, row.shadow_events);
    row.final_tau_max = sk.horizons_used.back();
    return row;
  };
  return parallel_map<LogisticRow>(cells.size(), ctx.threads, job);
}

std::vector<LogisticCell> summarise_logistic(const std::vector<LogisticRow>& rows) {
  std::map<std::pair<int, double>, std::vector<double>> groups;
  for (const auto& r : rows) groups[{r.order, r.rho}].push_back(r.efficiency);
  std::vector<LogisticCell> out;
  for (const auto& [key, eff] : groups) {
    LogisticCell c;
    c.order = key.first;
    c.rho = key.second;
    c.reps = eff.size();
    double sum = 0.0;
    for (double e : eff) sum += e;
    c.mean_efficiency = sum / static_cast<double>(eff.size());
    double ss = 0.0;
    for (double e : eff) ss += (e - c.mean_efficiency) * (e - c.mean_efficiency);
    c.sd_efficiency = eff.size() > 1 ? std::sqrt(ss / static_cast<double>(eff.size() - 1)) : 0.0;
    out.push_back(c);
  }
  return out;
}

void write_logistic_csv(const std::filesystem::path& table, const std::filesystem::path& reps,
                        const std::vector<LogisticRow>& rows) {
  {
    CsvWriter csv(table, {"order", "rho", "reps", "mean_efficiency", "sd_efficiency"});
    for (const auto& c : summarise_logistic(rows)) {
      csv.cell(c.order).cell(c.rho).cell(c.reps).cell(c.mean_efficiency).cell(c.sd_efficiency);
      csv.end_row();
    }
  }
  CsvWriter csv(reps, {"order", "rho", "rep", "events", "shadow_events", "efficiency",
                       "final_tau_max"});
  for (const auto& r : rows) {
    csv.cell(r.order).cell(r.rho).cell(r.rep).cell(r.events).cell(r.shadow_events)
        .cell(r.efficiency).cell(r.final_tau_max);
    csv.end_row();
  }
}

// ---- superposition ----

std::vector<SuperpositionRow> superposition_experiment(const SuperpositionOptions& opt,
                                                       const ExperimentContext& ctx) {
  if (opt.reps == 0) throw DomainError("superposition: reps must be positive");
  const ThinningMethod methods[] = {ThinningMethod::ConcaveConvex, ThinningMethod::Superposition};
  struct Cell {
    int method;
    Index dim;
    std::size_t rep;
  };
  std::vector<Cell> cells;
  for (Index d : opt.dims) {
    if (d < 1) throw DomainError("superposition: dimensions must be positive");
    for (int m = 0; m < 2; ++m)
      for (std::size_t rep = 0; rep < opt.reps; ++rep) cells.push_back({m, d, rep});
  }
  const std::function<SuperpositionRow(std::size_t)> job = [&](std::size_t i) {
    const Cell& c = cells[i];
    const auto ud = static_cast<std::uint64_t>(c.dim);
    const PoissonFieldModel model(
        PoissonFieldModel::simulate_data(c.dim, derive_seed(ctx.seed, {kSuperData, ud, c.rep})));
    Tuning tuning;
    tuning.method = methods[c.method];
    tuning.adaptive_horizon = true;
    tuning.recorded = {0};
    Rng rng(derive_seed(ctx.seed, {kSuper, static_cast<std::uint64_t>(c.method), ud, c.rep}));
    Skeleton sk;
    const double wall = timed([&] {
      sk = run_bps_global(model, origin(c.dim), opt.refresh_rate, opt.n_events, tuning, rng);
    });
    SuperpositionRow row;
    row.method = c.method == 0 ? "cc" : "superposition";
    row.dim = c.dim;
    row.rep = c.rep;
    row.events = sk.counters.events;
    row.shadow_events = sk.counters.shadow_events;
    row.efficiency = ratio(row.events, row.shadow_events);
    row.wall_seconds = wall;
    return row;
  };
  return parallel_map<SuperpositionRow>(cells.size(), ctx.threads, job);
}

void write_superposition_csv(const std::filesystem::path& file,
                             const std::vector<SuperpositionRow>& rows) {
  CsvWriter csv(file, {"method", "dim", "rep", "events", "shadow_events", "efficiency",
                       "wall_seconds"});
  for (const auto& r : rows) {
    csv.cell(r.method).cell(static_cast<long long>(r.dim)).cell(r.rep).cell(r.events)
        .cell(r.shadow_events).cell(r.efficiency).cell(r.wall_seconds);
    csv.end_row();
  }
}

// ---- scaling ----

std::vector<ScalingRow> scaling_experiment(const ScalingOptions& opt, const ExperimentContext& ctx) {
  if (opt.reps == 0) throw DomainError("scaling: reps must be positive");
  // block 0 stands for Zig-Zag and -1 for global BPS.
  std::vector<Index> samplers;
  if (opt.zigzag) samplers.push_back(0);
  for (Index j : opt.blocks) {
    if (j < 1) throw DomainError("scaling: block sizes must be positive");
    samplers.push_back(j);
  }
  if (opt.global_bps) samplers.push_back(-1);
  struct Cell {
    Index sampler;
    Index dim;
    std::size_t rep;
  };
  std::vector<Cell> cells;
  for (Index d : opt.dims) {
    if (d < 2) throw DomainError("scaling: dimensions must be at least 2");
    for (Index s : samplers)
      for (std::size_t rep = 0; rep < opt.reps; ++rep) cells.push_back({s, d, rep});
  }
  const std::function<ScalingRow(std::size_t)> job = [&](std::size_t i) {
    const Cell& c = cells[i];
    const auto ud = static_cast<std::uint64_t>(c.dim);
    const PoissonAr1Model model(
        PoissonAr1Model::simulate_data(c.dim, opt.rho, derive_seed(ctx.seed, {kScalingData, ud, c.rep})),
        opt.rho);
    Tuning tuning;
    tuning.adaptive_horizon = true;
    tuning.refresh_rate = opt.refresh_rate;
    tuning.recorded = {0};
    Rng rng(derive_seed(ctx.seed, {kScaling, static_cast<std::uint64_t>(c.sampler + 1), ud, c.rep}));
    Skeleton sk;
    double wall = 0.0;
    ScalingRow row;
    if (c.sampler == 0) {
      row.sampler = "zigzag";
      row.block = 1;
      wall = timed([&] { sk = run_zigzag(model, origin(c.dim), opt.n_events, tuning, rng); });
    } else if (c.sampler < 0) {
      row.sampler = "bps";
      row.block = c.dim;
      wall = timed([&] {
        sk = run_bps_global(model, origin(c.dim), opt.refresh_rate, opt.n_events, tuning, rng);
      });
    } else {
      row.sampler = "local_j" + std::to_string(c.sampler);
      row.block = c.sampler;
      const Factorisation fact = Factorisation::chain_blocks(model, c.sampler);
      wall = timed([&] {
        sk = run_local(model, fact, LocalKernel::ReflectSubset, origin(c.dim), opt.n_events,
                       tuning, rng);
      });
    }
    row.dim = c.dim;
    row.rep = c.rep;
    row.events = sk.counters.events;
    row.shadow_events = sk.counters.shadow_events;
    row.resimulations = sk.counters.resimulations;
    row.rate_evaluations = sk.counters.rate_evaluations;
    row.wall_seconds = wall;
    const MatrixXd samples = discretize(sk, opt.discretization);
    row.ess = ess(VectorXd(samples.col(0)));
    const double n = static_cast<double>(row.events);
    row.events_per_second = wall > 0.0 ? n / wall : 0.0;
    row.resimulations_per_event = static_cast<double>(row.resimulations) / n;
    row.ess_per_event = row.ess / n;
    row.ess_per_second = wall > 0.0 ? row.ess / wall : 0.0;
    return row;
  };
  return parallel_map<ScalingRow>(cells.size(), ctx.threads, job);
}

void write_scaling_csv(const std::filesystem::path& file, const std::vector<ScalingRow>& rows) {
  CsvWriter csv(file, {"sampler", "dim", "block", "rep", "events", "shadow_events",
                       "resimulations", "rate_evaluations", "wall_seconds", "ess_theta_1",
                       "events_per_second", "resimulations_per_event", "ess_per_event",
                       "ess_per_second"});
  for (const auto& r : rows) {
    csv.cell(r.sampler).cell(static_cast<long long>(r.dim)).cell(static_cast<long long>(r.block))
        .cell(r.rep).cell(r.events).cell(r.shadow_events).cell(r.resimulations)
        .cell(r.rate_evaluations).cell(r.wall_seconds).cell(r.ess).cell(r.events_per_second)
        .cell(r.resimulations_per_event).cell(r.ess_per_event).cell(r.ess_per_second);
    csv.end_row();
  }
}

// ---- GIG ----

std::vector<GigRow> gig_experiment(const GigOptions& opt, const ExperimentContext& ctx) {
  if (opt.reps == 0) throw DomainError("gig: reps must be positive");
  const GigModel model;
  const std::size_t n = opt.budgets.size() * opt.reps;
  const std::function<GigRow(std::size_t)> job = [&](std::size_t i) {
    GigRow row;
    row.budget = opt.budgets[i / opt.reps];
    row.rep = i % opt.reps;
    if (row.budget < 1) throw DomainError("gig: budgets must be positive");
    PDMPState s;
    s.theta = VectorXd::Ones(1);
    Tuning tuning;
    tuning.adaptive_horizon = true;
    Rng rng(derive_seed(ctx.seed, {kGig, row.budget, row.rep}));
    row.skeleton = run_zigzag(model, s, row.budget, tuning, rng);
    const Skeleton& sk = row.skeleton;
    row.events = sk.counters.events;
    row.shadow_events = sk.counters.shadow_events;
    row.boundary_hits = sk.counters.boundary_hits;
    row.min_theta = sk.position(0)(0);
    for (std::size_t k = 0; k < sk.size(); ++k) row.min_theta = std::min(row.min_theta, sk.position(k)(0));
    row.path_mean = path_integral_mean(sk, PathFunction::Coordinate, 0);
    return row;
  };
  return parallel_map<GigRow>(n, ctx.threads, job);
}

void write_gig_outputs(const std::filesystem::path& dir, const std::vector<GigRow>& rows) {
  CsvWriter csv(dir / "gig_summary.csv", {"budget", "rep", "events", "shadow_events",
                                          "boundary_hits", "min_theta", "path_mean", "file"});
  for (const auto& r : rows) {
    const std::string name =
        "gig_trajectory_" + std::to_string(r.budget) + "_" + std::to_string(r.rep) + ".csv";
    write_skeleton_csv(dir / name, r.skeleton);
    csv.cell(r.budget).cell(r.rep).cell(r.events).cell(r.shadow_events).cell(r.boundary_hits)
        .cell(r.min_theta).cell(r.path_mean).cell(name);
    csv.end_row();
  }
}

}  // namespace ccpdmp
