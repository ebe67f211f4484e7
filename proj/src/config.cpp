#include "ccpdmp/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ccpdmp/errors.hpp"

namespace ccpdmp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

struct Field {
  std::string key;
  std::string value;
  int line;

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError(key, line, "line " + std::to_string(line) + ": " + key + ": " + why);
  }

  double real() const {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x))
      fail("expected a finite number, got '" + value + "'");
    return x;
  }

  std::uint64_t count() const {
    if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
      fail("expected a nonnegative integer, got '" + value + "'");
    errno = 0;
    const auto x = std::strtoull(value.c_str(), nullptr, 10);
    if (errno == ERANGE) fail("integer out of range");
    return x;
  }

  std::uint64_t positive() const {
    const auto x = count();
    if (x == 0) fail("must be positive");
    return x;
  }
};

const std::set<std::string> kModels{"gaussian", "half_gaussian", "banana",      "logistic",
                                    "poisson_field", "poisson_ar1", "gig", "gamma"};

using Setter = std::function<void(RunConfig&, const Field&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"model",
       [](RunConfig& c, const Field& f) {
         if (!kModels.count(f.value)) f.fail("unknown model '" + f.value + "'");
         c.model = f.value;
       }},
      {"dim", [](RunConfig& c, const Field& f) { c.dim = static_cast<Index>(f.positive()); }},
      {"variance", [](RunConfig& c, const Field& f) { c.variance = f.real(); }},
      {"kappa", [](RunConfig& c, const Field& f) { c.kappa = f.real(); }},
      {"rho", [](RunConfig& c, const Field& f) { c.rho = f.real(); }},
      {"order", [](RunConfig& c, const Field& f) { c.order = static_cast<int>(f.positive()); }},
      {"n_obs", [](RunConfig& c, const Field& f) { c.n_obs = static_cast<Index>(f.positive()); }},
      {"data_seed", [](RunConfig& c, const Field& f) { c.data_seed = f.count(); }},
      {"alpha", [](RunConfig& c, const Field& f) { c.alpha = f.real(); }},
      {"beta", [](RunConfig& c, const Field& f) { c.beta = f.real(); }},
      {"sampler",
       [](RunConfig& c, const Field& f) {
         try {
           c.sampler = sampler_from_name(f.value);
         } catch (const DomainError&) {
           f.fail("unknown sampler '" + f.value + "' (zigzag, bps, local)");
         }
       }},
      {"block", [](RunConfig& c, const Field& f) { c.block = static_cast<Index>(f.positive()); }},
      {"n_events", [](RunConfig& c, const Field& f) { c.n_events = f.positive(); }},
      {"seed", [](RunConfig& c, const Field& f) { c.seed = f.count(); }},
      {"tau_mode",
       [](RunConfig& c, const Field& f) {
         if (f.value == "fixed") c.adaptive = false;
         else if (f.value == "adaptive") c.adaptive = true;
         else f.fail("expected fixed or adaptive");
       }},
      {"tau_max", [](RunConfig& c, const Field& f) { c.tau_max = f.real(); }},
      {"percentile", [](RunConfig& c, const Field& f) { c.percentile = f.real(); }},
      {"window", [](RunConfig& c, const Field& f) { c.window = f.positive(); }},
      {"refresh_rate", [](RunConfig& c, const Field& f) { c.refresh_rate = f.real(); }},
      {"thinning",
       [](RunConfig& c, const Field& f) {
         if (f.value == "cc") c.thinning = ThinningMethod::ConcaveConvex;
         else if (f.value == "superposition") c.thinning = ThinningMethod::Superposition;
         else f.fail("expected cc or superposition");
       }},
      {"max_thinning_iters",
       [](RunConfig& c, const Field& f) { c.max_thinning_iters = f.positive(); }},
      {"theta0", [](RunConfig& c, const Field& f) { c.theta0 = f.real(); }},
      {"discretization",
       [](RunConfig& c, const Field& f) { c.discretization = static_cast<Index>(f.positive()); }},
      {"output_dir",
       [](RunConfig& c, const Field& f) {
         if (f.value.empty()) f.fail("must not be empty");
         c.output_dir = f.value;
       }},
  };
  return table;
}

bool bounded_model(const std::string& name) {
  return name == "half_gaussian" || name == "gig" || name == "gamma";
}

}  // namespace

SamplerKind sampler_from_name(const std::string& name) {
  if (name == "zigzag") return SamplerKind::ZigZag;
  if (name == "bps") return SamplerKind::Bps;
  if (name == "local") return SamplerKind::Local;
  throw DomainError("unknown sampler '" + name + "'");
}

std::string sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::ZigZag: return "zigzag";
    case SamplerKind::Bps: return "bps";
    case SamplerKind::Local: return "local";
  }
  return "?";
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string raw;
  std::map<std::string, int> seen;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", line, "line " + std::to_string(line) + ": expected key = value");
    Field f{trim(body.substr(0, eq)), unquote(trim(body.substr(eq + 1))), line};
    const auto it = setters().find(f.key);
    if (it == setters().end()) f.fail("unknown key");
    if (!seen.emplace(f.key, line).second) f.fail("repeated key");
    it->second(config, f);
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    // Cross-field checks: point at the line that set the offending key.
    const auto at = seen.find(e.field());
    if (at == seen.end()) throw;
    throw ConfigError(e.field(), at->second,
                      "line " + std::to_string(at->second) + ": " + e.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("", 0, "cannot read config file " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void RunConfig::validate() const {
  auto bad = [](const char* key, const std::string& why) {
    throw ConfigError(key, 0, std::string(key) + ": " + why);
  };
  if (!(variance > 0.0)) bad("variance", "must be positive");
  if (!(kappa >= 0.0)) bad("kappa", "must be nonnegative");
  if (model == "logistic" && !(std::abs(rho) < 1.0)) bad("rho", "must lie in (-1, 1)");
  if (model == "poisson_ar1" && !(std::abs(rho) < 1.0)) bad("rho", "must lie in (-1, 1)");
  if (model == "logistic" && (order < 1 || order > 3)) bad("order", "must be 1, 2 or 3");
  if (!(alpha > 0.0)) bad("alpha", "must be positive");
  if (!(beta > 0.0)) bad("beta", "must be positive");
  if (!(tau_max > 0.0)) bad("tau_max", "must be positive");
  if (!(percentile > 0.0 && percentile <= 100.0)) bad("percentile", "must lie in (0, 100]");
  if (!(refresh_rate >= 0.0)) bad("refresh_rate", "must be nonnegative");
  if (bounded_model(model) && !(initial_theta() > 0.0)) bad("theta0", "must be positive for " + model);
  if (thinning == ThinningMethod::Superposition && sampler != SamplerKind::Bps)
    bad("thinning", "superposition is only available for the bps sampler");
  if (thinning == ThinningMethod::Superposition && model != "poisson_field")
    bad("thinning", "superposition needs the poisson_field model");
}

double RunConfig::initial_theta() const {
  return theta0.value_or(bounded_model(model) ? 1.0 : 0.0);
}

Tuning RunConfig::tuning() const {
  Tuning t;
  t.tau_max = tau_max;
  t.adaptive_horizon = adaptive;
  t.percentile = percentile;
  t.window = window;
  t.max_thinning_iters = max_thinning_iters;
  t.refresh_rate = sampler == SamplerKind::ZigZag ? 0.0 : refresh_rate;
  t.method = thinning;
  return t;
}

ModelPtr make_model(const RunConfig& c) {
  if (c.model == "gaussian") return std::make_shared<GaussianModel>(c.dim, c.variance);
  if (c.model == "half_gaussian") return std::make_shared<GaussianModel>(c.dim, c.variance, true);
  if (c.model == "banana") return std::make_shared<BananaModel>(c.kappa);
  if (c.model == "logistic")
    return std::make_shared<GlmModel>(logistic_experiment_data(c.rho, c.data_seed, c.n_obs),
                                      c.order);
  if (c.model == "poisson_field")
    return std::make_shared<PoissonFieldModel>(PoissonFieldModel::simulate_data(c.dim, c.data_seed));
  if (c.model == "poisson_ar1")
    return std::make_shared<PoissonAr1Model>(
        PoissonAr1Model::simulate_data(c.dim, c.rho, c.data_seed), c.rho);
  if (c.model == "gig") return std::make_shared<GigModel>();
  if (c.model == "gamma") return std::make_shared<GammaModel>(c.alpha, c.beta);
  throw ConfigError("model", 0, "model: unknown '" + c.model + "'");
}

Skeleton run_sampler(const Model& model, const RunConfig& c, Rng& rng) {
  PDMPState s;
  s.theta = VectorXd::Constant(model.dimension(), c.initial_theta());
  const Tuning tuning = c.tuning();
  switch (c.sampler) {
    case SamplerKind::ZigZag: return run_zigzag(model, s, c.n_events, tuning, rng);
    case SamplerKind::Bps: return run_bps_global(model, s, c.refresh_rate, c.n_events, tuning, rng);
    case SamplerKind::Local:
      return run_local(model, Factorisation::chain_blocks(model, c.block),
                       LocalKernel::ReflectSubset, s, c.n_events, tuning, rng);
  }
  throw DomainError("unknown sampler");
}

}  // namespace ccpdmp
