// ccpdmp: run one configured sampler, or one of the experiment recipes.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ccpdmp/config.hpp"
#include "ccpdmp/experiments.hpp"
#include "ccpdmp/output.hpp"
#include "ccpdmp/random.hpp"

namespace fs = std::filesystem;
using namespace ccpdmp;

namespace {

constexpr int kConfigExit = 2;
constexpr int kSamplerExit = 3;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

int cmd_sample(const fs::path& config_file, std::optional<std::uint64_t> seed,
               std::optional<fs::path> out) {
  RunConfig config;
  try {
    config = load_config(config_file);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  }
  if (seed) config.seed = *seed;
  if (out) config.output_dir = *out;

  const ModelPtr model = make_model(config);
  Rng rng(config.seed);
  Skeleton sk;
  const double wall = timed([&] { sk = run_sampler(*model, config, rng); });
  const MatrixXd samples = discretize(sk, config.discretization);

  ensure_dir(config.output_dir);
  write_skeleton_csv(config.output_dir / "skeleton.csv", sk);
  write_samples_csv(config.output_dir / "samples.csv", sk, samples);
  const MetricsReport report = make_metrics(sk, samples);
  write_text(config.output_dir / "metrics.json", metrics_json(report));
  for (const auto& w : sk.warnings) std::cerr << "warning: " << w << "\n";
  std::printf("%s %s: %zu events, %zu shadow events, efficiency %.4f, %.3f s\n",
              model->name().c_str(), sampler_name(config.sampler).c_str(), report.counters.events,
              report.counters.shadow_events, report.efficiency, wall);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concave-convex adaptive thinning for PDMP samplers"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out = ".";
  unsigned threads = 1;
  std::size_t reps = 0;
  std::size_t events = 0;

  auto* sample = app.add_subcommand("sample", "Run the sampler described by a config file");
  std::string config_file;
  sample->add_option("--config", config_file, "key = value config file")->required();
  auto* sample_seed = sample->add_option("--seed", seed, "overrides the config seed");
  auto* sample_out = sample->add_option("--out", out, "overrides output_dir");

  auto* experiment = app.add_subcommand("experiment", "Run an experiment recipe");
  experiment->require_subcommand(1);
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "base seed for derived cell seeds");
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--reps", reps, "replications per cell");
    cmd->add_option("--events", events, "events per run");
  };

  BananaOptions banana;
  auto* c_banana = experiment->add_subcommand("banana", "Zig-Zag efficiency against tau_max");
  common(c_banana);
  c_banana->add_option("--grid", banana.grid, "tau_max values")->delimiter(',');
  c_banana->add_option("--kappa", banana.kappa, "banana curvature");

  LogisticOptions logistic;
  auto* c_logistic = experiment->add_subcommand("logistic", "Thinning efficiency by Taylor order");
  common(c_logistic);
  c_logistic->add_option("--orders", logistic.orders, "polynomial orders")->delimiter(',');
  c_logistic->add_option("--rhos", logistic.rhos, "covariate correlations")->delimiter(',');
  c_logistic->add_option("--max-thinning-iters", logistic.max_thinning_iters,
                         "thinning iterations allowed per event");

  SuperpositionOptions superposition;
  auto* c_super = experiment->add_subcommand("superposition",
                                             "Global BPS: CC against superposition thinning");
  common(c_super);
  c_super->add_option("--dims", superposition.dims, "dimensions")->delimiter(',');
  c_super->add_option("--refresh-rate", superposition.refresh_rate, "BPS refresh rate");

  ScalingOptions scaling;
  auto* c_scaling = experiment->add_subcommand("scaling", "Local samplers against global BPS");
  common(c_scaling);
  c_scaling->add_option("--dims", scaling.dims, "dimensions")->delimiter(',');
  c_scaling->add_option("--blocks", scaling.blocks, "local BPS block sizes")->delimiter(',');
  c_scaling->add_option("--refresh-rate", scaling.refresh_rate, "BPS refresh rate");
  c_scaling->add_option("--discretization", scaling.discretization, "samples for the ESS");

  GigOptions gig;
  auto* c_gig = experiment->add_subcommand("gig", "Trajectories on the GIG target");
  common(c_gig);
  c_gig->add_option("--budgets", gig.budgets, "event budgets")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (sample->parsed()) {
      std::optional<std::uint64_t> s;
      std::optional<fs::path> o;
      if (sample_seed->count()) s = seed;
      if (sample_out->count()) o = out;
      return cmd_sample(config_file, s, o);
    }

    const ExperimentContext ctx{seed, threads, out};
    ensure_dir(ctx.out);
    double wall = 0.0;
    if (c_banana->parsed()) {
      if (reps) banana.reps = reps;
      if (events) banana.n_events = events;
      std::vector<BananaRow> rows;
      wall = timed([&] { rows = banana_experiment(banana, ctx); });
      write_banana_csv(ctx.out / "efficiency_vs_taumax.csv", rows);
    } else if (c_logistic->parsed()) {
      if (reps) logistic.reps = reps;
      if (events) logistic.n_events = events;
      std::vector<LogisticRow> rows;
      wall = timed([&] { rows = logistic_experiment(logistic, ctx); });
      write_logistic_csv(ctx.out / "table1.csv", ctx.out / "table1_reps.csv", rows);
      for (const auto& c : summarise_logistic(rows))
        std::printf("order %d  rho %.2f  efficiency %.3f (sd %.3f)\n", c.order, c.rho,
                    c.mean_efficiency, c.sd_efficiency);
    } else if (c_super->parsed()) {
      if (reps) superposition.reps = reps;
      if (events) superposition.n_events = events;
      std::vector<SuperpositionRow> rows;
      wall = timed([&] { rows = superposition_experiment(superposition, ctx); });
      write_superposition_csv(ctx.out / "fig4.csv", rows);
    } else if (c_scaling->parsed()) {
      if (reps) scaling.reps = reps;
      if (events) scaling.n_events = events;
      std::vector<ScalingRow> rows;
      wall = timed([&] { rows = scaling_experiment(scaling, ctx); });
      write_scaling_csv(ctx.out / "fig5.csv", rows);
    } else if (c_gig->parsed()) {
      if (reps) gig.reps = reps;
      std::vector<GigRow> rows;
      wall = timed([&] { rows = gig_experiment(gig, ctx); });
      write_gig_outputs(ctx.out, rows);
    }
    std::printf("done in %.2f s, outputs in %s\n", wall, ctx.out.string().c_str());
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSamplerExit;
  }
}
