#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "ccpdmp/models.hpp"
#include "ccpdmp/samplers.hpp"

namespace ccpdmp {

/// Malformed or out-of-range configuration. `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, int line, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

enum class SamplerKind { ZigZag, Bps, Local };

/// Everything `ccpdmp sample` needs for one run.
struct RunConfig {
  // target
  std::string model = "gaussian";
  Index dim = 1;
  double variance = 1.0;
  double kappa = 1.0;
  double rho = 0.0;
  int order = 2;
  Index n_obs = 200;
  std::uint64_t data_seed = 1;
  double alpha = 2.0;
  double beta = 1.0;

  // sampler
  SamplerKind sampler = SamplerKind::ZigZag;
  Index block = 1;
  std::size_t n_events = 1000;
  std::uint64_t seed = 1;
  bool adaptive = false;
  double tau_max = 1.0;
  double percentile = 80.0;
  std::size_t window = 100;
  double refresh_rate = 1.0;
  ThinningMethod thinning = ThinningMethod::ConcaveConvex;
  std::size_t max_thinning_iters = kDefaultMaxThinningIters;
  std::optional<double> theta0;  ///< every coordinate starts here; default 0, or 1 on theta > 0

  // output
  Index discretization = 10000;
  std::filesystem::path output_dir = "out";

  Tuning tuning() const;
  double initial_theta() const;
  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, repeated
/// keys and bad values throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& file);

SamplerKind sampler_from_name(const std::string& name);
std::string sampler_name(SamplerKind kind);

/// Builds the target named by the config (data sets are simulated from data_seed).
ModelPtr make_model(const RunConfig& config);

/// Runs the configured sampler from its default initial state.
Skeleton run_sampler(const Model& model, const RunConfig& config, Rng& rng);

}  // namespace ccpdmp
