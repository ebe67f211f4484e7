#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ccpdmp/samplers.hpp"

namespace ccpdmp {

/// Settings shared by every experiment recipe.
struct ExperimentContext {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::filesystem::path out = ".";
};

/// Calls job(i) for i in [0, n) on up to `threads` workers. Results are stored
/// by index, so the output does not depend on scheduling. The first exception
/// thrown by any job is rethrown after all workers stop.
template <class R>
std::vector<R> parallel_map(std::size_t n, unsigned threads, const std::function<R(std::size_t)>& job) {
  std::vector<R> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  const unsigned k = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (k == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < k; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

/// Seconds on the monotonic clock spent in `body`.
double timed(const std::function<void()>& body);

// ---- banana: efficiency against tau_max ----

struct BananaOptions {
  std::vector<double> grid;  ///< empty: 0.1, 0.2, ..., 4.0
  double kappa = 1.0;
  std::size_t n_events = 10000;
  std::size_t reps = 1;
};

struct BananaRow {
  std::string mode;  ///< "fixed" or "adaptive"
  double tau_max = 0.0;  ///< grid value, or the last adapted value
  std::size_t rep = 0;
  std::size_t events = 0;
  std::size_t shadow_events = 0;
  double efficiency = 0.0;
  std::vector<FactorCounters> per_factor;
};

std::vector<double> default_banana_grid();
std::vector<BananaRow> banana_experiment(const BananaOptions& options, const ExperimentContext& ctx);
void write_banana_csv(const std::filesystem::path& file, const std::vector<BananaRow>& rows);

// ---- logistic regression: efficiency by Taylor order and covariate correlation ----

struct LogisticOptions {
  std::vector<int> orders{1, 2, 3};
  std::vector<double> rhos{0.0, 0.25, 0.5, 0.65, 0.75, 0.85, 0.95};
  std::size_t reps = 20;
  std::size_t n_events = 5000;
  Index n_obs = 200;
  std::size_t max_thinning_iters = 100000;
};

struct LogisticRow {
  int order = 0;
  double rho = 0.0;
  std::size_t rep = 0;
  std::size_t events = 0;
  std::size_t shadow_events = 0;
  double efficiency = 0.0;
  double final_tau_max = 0.0;
};

struct LogisticCell {
  int order = 0;
  double rho = 0.0;
  std::size_t reps = 0;
  double mean_efficiency = 0.0;
  double sd_efficiency = 0.0;
};

std::vector<LogisticRow> logistic_experiment(const LogisticOptions& options,
                                             const ExperimentContext& ctx);
std::vector<LogisticCell> summarise_logistic(const std::vector<LogisticRow>& rows);
void write_logistic_csv(const std::filesystem::path& table, const std::filesystem::path& reps,
                        const std::vector<LogisticRow>& rows);

// ---- Poisson field: CC against superposition thinning for global BPS ----

struct SuperpositionOptions {
  std::vector<Index> dims{1, 2, 4, 8, 16, 32, 64, 128};
  std::size_t n_events = 1000;
  std::size_t reps = 20;
  double refresh_rate = 1.0;
};

struct SuperpositionRow {
  std::string method;  ///< "cc" or "superposition"
  Index dim = 0;
  std::size_t rep = 0;
  std::size_t events = 0;
  std::size_t shadow_events = 0;
  double efficiency = 0.0;
  double wall_seconds = 0.0;
};

std::vector<SuperpositionRow> superposition_experiment(const SuperpositionOptions& options,
                                                       const ExperimentContext& ctx);
void write_superposition_csv(const std::filesystem::path& file,
                             const std::vector<SuperpositionRow>& rows);

// ---- Poisson AR(1) field: local factorisations against global BPS ----

struct ScalingOptions {
  std::vector<Index> dims{32, 64, 128, 256, 512};
  std::vector<Index> blocks{1, 4, 16};  ///< local BPS chain block sizes
  bool zigzag = true;
  bool global_bps = true;
  std::size_t n_events = 20000;
  std::size_t reps = 10;
  double rho = 0.5;
  double refresh_rate = 1.0;
  Index discretization = 10000;
};

struct ScalingRow {
  std::string sampler;  ///< "zigzag", "local_j<j>" or "bps"
  Index dim = 0;
  Index block = 0;
  std::size_t rep = 0;
  std::size_t events = 0;
  std::size_t shadow_events = 0;
  std::size_t resimulations = 0;
  std::size_t rate_evaluations = 0;
  double wall_seconds = 0.0;
  double ess = 0.0;
  double events_per_second = 0.0;
  double resimulations_per_event = 0.0;
  double ess_per_event = 0.0;
  double ess_per_second = 0.0;
};

std::vector<ScalingRow> scaling_experiment(const ScalingOptions& options, const ExperimentContext& ctx);
void write_scaling_csv(const std::filesystem::path& file, const std::vector<ScalingRow>& rows);

// ---- GIG trajectories at increasing event budgets ----

struct GigOptions {
  std::vector<std::size_t> budgets{10, 100, 1000, 10000};
  std::size_t reps = 1;
  Index discretization = 10000;
};

struct GigRow {
  std::size_t budget = 0;
  std::size_t rep = 0;
  std::size_t events = 0;
  std::size_t shadow_events = 0;
  std::size_t boundary_hits = 0;
  double min_theta = 0.0;
  double path_mean = 0.0;
  Skeleton skeleton;
};

std::vector<GigRow> gig_experiment(const GigOptions& options, const ExperimentContext& ctx);
/// gig_summary.csv plus one gig_trajectory_<budget>_<rep>.csv skeleton per run.
void write_gig_outputs(const std::filesystem::path& dir, const std::vector<GigRow>& rows);

}  // namespace ccpdmp
