#include "ccpdmp/models.hpp"

#include <cmath>
#include <numeric>

#include "ccpdmp/errors.hpp"
#include "ccpdmp/random.hpp"

namespace ccpdmp {

namespace {

void check_coords(const Model& model, std::span<const Index> coords) {
  for (Index k : coords)
    if (k < 0 || k >= model.dimension())
      throw DomainError(model.name() + ": coordinate " + std::to_string(k) + " out of range");
}

// Knuth's multiplication method; means here stay small.
double poisson_draw(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  double prod = rng.uniform();
  double k = 0.0;
  while (prod > limit) {
    prod *= rng.uniform();
    k += 1.0;
  }
  return k;
}

}  // namespace

// ---- Model ----

std::vector<Index> Model::dependencies(Index) const { return all_coordinates(); }

std::vector<ClockTerm> Model::superposition_terms(const VectorXd&, const VectorXd&) const {
  throw DomainError(name() + ": no superposition terms available");
}

std::vector<std::optional<double>> Model::lower_bounds() const {
  std::vector<std::optional<double>> out(dimension());
  for (Index k = 0; k < dimension(); ++k) out[k] = lower_bound(k);
  return out;
}

double Model::directional_derivative(const VectorXd& theta, const VectorXd& v, double t) const {
  return v.dot(gradient(theta + t * v));
}

std::vector<Index> Model::all_coordinates() const {
  std::vector<Index> out(dimension());
  std::iota(out.begin(), out.end(), Index{0});
  return out;
}

// ---- Gaussian ----

GaussianModel::GaussianModel(Index dim, double variance, bool truncated)
    : dim_(dim), variance_(variance), truncated_(truncated) {
  if (dim < 1) throw DomainError("gaussian: dimension must be >= 1");
  if (!(variance > 0.0)) throw DomainError("gaussian: variance must be positive");
}

double GaussianModel::potential(const VectorXd& theta) const {
  return 0.5 * theta.squaredNorm() / variance_;
}

VectorXd GaussianModel::gradient(const VectorXd& theta) const { return theta / variance_; }

double GaussianModel::partial(const VectorXd& theta, Index k) const { return theta(k) / variance_; }

std::optional<double> GaussianModel::lower_bound(Index) const {
  if (truncated_) return 0.0;
  return std::nullopt;
}

CCFunction GaussianModel::rate(const VectorXd& theta, const VectorXd& v,
                               std::span<const Index> coords, double horizon) const {
  check_coords(*this, coords);
  Polynomial p;
  for (Index k : coords) p += gaussian_prior_rate(theta(k), v(k), variance_);
  return poly_to_cc(p, horizon);
}

// ---- Banana ----

BananaModel::BananaModel(double kappa) : kappa_(kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("banana: kappa must be >= 0");
}

double BananaModel::potential(const VectorXd& theta) const {
  const double r = theta(1) - theta(0) * theta(0);
  return (theta(0) - 1.0) * (theta(0) - 1.0) + kappa_ * r * r;
}

VectorXd BananaModel::gradient(const VectorXd& theta) const {
  const double r = theta(1) - theta(0) * theta(0);
  VectorXd g(2);
  g(0) = 2.0 * (theta(0) - 1.0) - 4.0 * kappa_ * theta(0) * r;
  g(1) = 2.0 * kappa_ * r;
  return g;
}

Polynomial banana_rate_poly(const VectorXd& theta, const VectorXd& v, double kappa, Index k) {
  if (theta.size() != 2 || v.size() != 2) throw DomainError("banana: state must be 2-dimensional");
  const Polynomial x1 = Polynomial::affine(theta(0), v(0));
  const Polynomial x2 = Polynomial::affine(theta(1), v(1));
  const Polynomial r = x2 - x1 * x1;
  if (k == 0) return v(0) * (2.0 * (x1 - Polynomial::constant(1.0)) - 4.0 * kappa * (x1 * r));
  if (k == 1) return v(1) * (2.0 * kappa * r);
  throw DomainError("banana: coordinate must be 0 or 1");
}

CCFunction BananaModel::rate(const VectorXd& theta, const VectorXd& v,
                             std::span<const Index> coords, double horizon) const {
  check_coords(*this, coords);
  Polynomial p;
  for (Index k : coords) p += banana_rate_poly(theta, v, kappa_, k);
  return poly_to_cc(p, horizon);
}

// ---- GLM ----

GlmModel::GlmModel(GLMData data, int order) : data_(std::move(data)), order_(order) {
  data_.validate();
  if (order < 1 || order > 3) throw DomainError("GLM: polynomial order must be 1, 2 or 3");
  // Fail early if the family cannot bound the required derivative.
  data_.family.derivative_bound(order + 1, 0.0, 0.0);
}

double GlmModel::potential(const VectorXd& theta) const {
  const VectorXd a = data_.x * theta;
  double u = 0.0;
  for (Index i = 0; i < data_.n(); ++i) u += data_.family.derivative(0, a(i), data_.y(i));
  return u + 0.5 * (theta.array().square() / data_.prior_variance.array()).sum();
}

VectorXd GlmModel::gradient(const VectorXd& theta) const {
  const VectorXd a = data_.x * theta;
  VectorXd g(data_.n());
  for (Index i = 0; i < data_.n(); ++i) g(i) = data_.family.derivative(1, a(i), data_.y(i));
  return data_.x.transpose() * g + theta.cwiseQuotient(data_.prior_variance);
}

namespace {

struct GlmRateState {
  const GLMData* data;
  VectorXd a0;
  VectorXd slope;
  std::vector<Index> coords;
  VectorXd theta_c;  // theta on coords
  VectorXd v_c;      // v on coords
};

}  // namespace

CCFunction GlmModel::rate(const VectorXd& theta, const VectorXd& v, std::span<const Index> coords,
                          double horizon) const {
  check_coords(*this, coords);
  auto state = std::make_shared<GlmRateState>();
  state->data = &data_;
  state->a0 = data_.x * theta;
  state->slope = data_.x * v;
  state->coords.assign(coords.begin(), coords.end());
  state->theta_c.resize(coords.size());
  state->v_c.resize(coords.size());
  Polynomial bound;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    const Index k = coords[j];
    state->theta_c(j) = theta(k);
    state->v_c(j) = v(k);
    bound += glm_taylor_rate(data_, state->a0, state->slope, v(k), k, order_, horizon);
    bound += gaussian_prior_rate(theta(k), v(k), data_.prior_variance(k));
  }
  auto target = [state](double t) {
    const GLMData& d = *state->data;
    VectorXd g(d.n());
    for (Index i = 0; i < d.n(); ++i)
      g(i) = d.family.derivative(1, state->a0(i) + t * state->slope(i), d.y(i));
    double f = 0.0;
    for (std::size_t j = 0; j < state->coords.size(); ++j) {
      const Index k = state->coords[j];
      const double vk = state->v_c(j);
      if (vk == 0.0) continue;
      f += vk * (d.x.col(k).dot(g) + (state->theta_c(j) + vk * t) / d.prior_variance(k));
    }
    return f;
  };
  return poly_bound_to_cc(bound, horizon, target);
}

// ---- affine plus exponential rates ----

CCFunction affine_exp_cc(double intercept, double slope, std::vector<ExpTerm> terms,
                         double horizon) {
  if (!(horizon > 0.0)) throw DomainError("affine_exp_cc: horizon must be positive");
  auto convex = std::make_shared<std::vector<ExpTerm>>();
  auto concave = std::make_shared<std::vector<ExpTerm>>();
  for (const auto& term : terms) {
    if (term.c > 0.0) convex->push_back(term);
    else if (term.c < 0.0) concave->push_back(term);
  }
  CCFunction cc;
  cc.horizon = horizon;
  cc.eval_convex = [intercept, slope, convex](double t) {
    double f = intercept + slope * t;
    for (const auto& e : *convex) f += e.c * std::exp(e.r * t);
    return f;
  };
  cc.eval_concave = [concave](double t) {
    double f = 0.0;
    for (const auto& e : *concave) f += e.c * std::exp(e.r * t);
    return f;
  };
  cc.eval_concave_deriv = [concave](double t) {
    double f = 0.0;
    for (const auto& e : *concave) f += e.c * e.r * std::exp(e.r * t);
    return f;
  };
  cc.affine_exact = convex->empty() && concave->empty();
  return cc;
}

CCFunction poisson_field_cc(double theta_k, double v_k, double y_k, double horizon) {
  std::vector<ExpTerm> terms;
  if (v_k != 0.0) terms.push_back({v_k * std::exp(theta_k), v_k});
  return affine_exp_cc(v_k * (theta_k - y_k), v_k * v_k, std::move(terms), horizon);
}

// ---- Poisson mean field ----

PoissonFieldModel::PoissonFieldModel(VectorXd y) : y_(std::move(y)) {
  if (y_.size() < 1) throw DomainError("poisson_field: empty data");
  for (Index k = 0; k < y_.size(); ++k) GlmFamily::poisson().check_response(y_(k));
}

double PoissonFieldModel::potential(const VectorXd& theta) const {
  return (0.5 * theta.array().square() + theta.array().exp() - y_.array() * theta.array()).sum();
}

VectorXd PoissonFieldModel::gradient(const VectorXd& theta) const {
  return (theta.array() - y_.array() + theta.array().exp()).matrix();
}

double PoissonFieldModel::partial(const VectorXd& theta, Index k) const {
  return theta(k) - y_(k) + std::exp(theta(k));
}

CCFunction PoissonFieldModel::rate(const VectorXd& theta, const VectorXd& v,
                                   std::span<const Index> coords, double horizon) const {
  check_coords(*this, coords);
  double intercept = 0.0;
  double slope = 0.0;
  std::vector<ExpTerm> terms;
  terms.reserve(coords.size());
  for (Index k : coords) {
    const double vk = v(k);
    if (vk == 0.0) continue;
    intercept += vk * (theta(k) - y_(k));
    slope += vk * vk;
    terms.push_back({vk * std::exp(theta(k)), vk});
  }
  return affine_exp_cc(intercept, slope, std::move(terms), horizon);
}

std::vector<ClockTerm> PoissonFieldModel::superposition_terms(const VectorXd& theta,
                                                              const VectorXd& v) const {
  double intercept = 0.0;
  double slope = 0.0;
  std::vector<ClockTerm> terms;
  terms.reserve(y_.size() + 1);
  terms.push_back({});
  for (Index k = 0; k < y_.size(); ++k) {
    intercept += v(k) * (theta(k) - y_(k));
    slope += v(k) * v(k);
    terms.push_back(ClockTerm::exponential(v(k) * std::exp(theta(k)), v(k)));
  }
  terms.front() = ClockTerm::affine(intercept, slope);
  return terms;
}

// ---- Poisson AR(1) ----

PoissonAr1Model::PoissonAr1Model(VectorXd y, double rho) : y_(std::move(y)), rho_(rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("poisson_ar1: rho must lie in [0, 1)");
  if (y_.size() < 1) throw DomainError("poisson_ar1: empty data");
  for (Index k = 0; k < y_.size(); ++k) GlmFamily::poisson().check_response(y_(k));
}

double PoissonAr1Model::prior_linear(const VectorXd& x, Index k) const {
  const Index n = y_.size();
  if (n == 1) return (1.0 - rho_ * rho_) * x(0);
  if (k == 0) return x(0) - rho_ * x(1);
  if (k == n - 1) return x(k) - rho_ * x(k - 1);
  return (1.0 + rho_ * rho_) * x(k) - rho_ * (x(k - 1) + x(k + 1));
}

double poisson_ar1_grad(const VectorXd& theta, const VectorXd& y, double rho, Index k) {
  return PoissonAr1Model(y, rho).partial(theta, k);
}

double PoissonAr1Model::potential(const VectorXd& theta) const {
  const Index n = y_.size();
  double u = (theta.array().exp() - y_.array() * theta.array()).sum();
  u += 0.5 * (1.0 - rho_ * rho_) * theta(0) * theta(0);
  for (Index i = 1; i < n; ++i) {
    const double r = theta(i) - rho_ * theta(i - 1);
    u += 0.5 * r * r;
  }
  return u;
}

VectorXd PoissonAr1Model::gradient(const VectorXd& theta) const {
  VectorXd g(y_.size());
  for (Index k = 0; k < y_.size(); ++k) g(k) = partial(theta, k);
  return g;
}

double PoissonAr1Model::partial(const VectorXd& theta, Index k) const {
  if (k < 0 || k >= y_.size()) throw DomainError("poisson_ar1: coordinate out of range");
  return prior_linear(theta, k) - y_(k) + std::exp(theta(k));
}

std::vector<Index> PoissonAr1Model::dependencies(Index k) const {
  std::vector<Index> out;
  if (k > 0) out.push_back(k - 1);
  out.push_back(k);
  if (k + 1 < y_.size()) out.push_back(k + 1);
  return out;
}

CCFunction PoissonAr1Model::rate(const VectorXd& theta, const VectorXd& v,
                                 std::span<const Index> coords, double horizon) const {
  check_coords(*this, coords);
  double intercept = 0.0;
  double slope = 0.0;
  std::vector<ExpTerm> terms;
  terms.reserve(coords.size());
  for (Index k : coords) {
    const double vk = v(k);
    if (vk == 0.0) continue;
    intercept += vk * (prior_linear(theta, k) - y_(k));
    slope += vk * prior_linear(v, k);
    terms.push_back({vk * std::exp(theta(k)), vk});
  }
  return affine_exp_cc(intercept, slope, std::move(terms), horizon);
}

VectorXd PoissonFieldModel::simulate_data(Index n, std::uint64_t seed) {
  if (n < 1) throw DomainError("poisson_field: n must be >= 1");
  Rng rng(seed);
  VectorXd y(n);
  for (Index i = 0; i < n; ++i) y(i) = poisson_draw(rng, std::exp(rng.normal()));
  return y;
}

VectorXd PoissonAr1Model::simulate_data(Index n, double rho, std::uint64_t seed) {
  if (n < 1) throw DomainError("poisson_ar1: n must be >= 1");
  Rng rng(seed);
  VectorXd y(n);
  double theta = rng.normal() / std::sqrt(1.0 - rho * rho);
  for (Index i = 0; i < n; ++i) {
    if (i > 0) theta = rho * theta + rng.normal();
    y(i) = poisson_draw(rng, std::exp(theta));
  }
  return y;
}

// ---- GIG and Gamma ----

namespace {

void check_positive_path(const char* what, double theta, double v, double horizon) {
  if (!(theta > 0.0)) throw DomainError(std::string(what) + ": theta must be positive");
  if (!(horizon > 0.0)) throw DomainError(std::string(what) + ": horizon must be positive");
  if (v < 0.0 && theta + v * horizon <= 0.0)
    throw DomainError(std::string(what) + ": horizon reaches the boundary");
}

}  // namespace

CCFunction gig_cc(double theta, double v, double horizon) {
  check_positive_path("gig", theta, v, horizon);
  if (v == 0.0) return zero_cc(horizon);
  CCFunction cc;
  cc.horizon = horizon;
  if (v > 0.0) {
    cc.eval_convex = [=](double t) { return v * (1.0 + 2.0 / (theta + v * t)); };
    cc.eval_concave = [=](double t) {
      const double x = theta + v * t;
      return -v / (x * x);
    };
    cc.eval_concave_deriv = [=](double t) {
      const double x = theta + v * t;
      return 2.0 * v * v / (x * x * x);
    };
  } else {
    cc.eval_convex = [=](double t) {
      const double x = theta + v * t;
      return v * (1.0 - 1.0 / (x * x));
    };
    cc.eval_concave = [=](double t) { return 2.0 * v / (theta + v * t); };
    cc.eval_concave_deriv = [=](double t) {
      const double x = theta + v * t;
      return -2.0 * v * v / (x * x);
    };
  }
  return cc;
}

CCFunction gamma_cc(double theta, double v, double alpha, double beta, double horizon) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("gamma: alpha and beta must be positive");
  check_positive_path("gamma", theta, v, horizon);
  const double s = alpha - 1.0;
  CCFunction cc;
  cc.horizon = horizon;
  if (v * s > 0.0) {
    cc.eval_convex = [=](double) { return v * beta; };
    cc.eval_concave = [=](double t) { return -v * s / (theta + v * t); };
    cc.eval_concave_deriv = [=](double t) {
      const double x = theta + v * t;
      return v * v * s / (x * x);
    };
  } else {
    cc.eval_convex = [=](double t) { return v * (beta - s / (theta + v * t)); };
    cc.eval_concave = [](double) { return 0.0; };
    cc.eval_concave_deriv = [](double) { return 0.0; };
  }
  return cc;
}

double GigModel::potential(const VectorXd& theta) const {
  const double x = theta(0);
  if (!(x > 0.0)) throw DomainError("gig: theta must be positive");
  return x + 1.0 / x + 2.0 * std::log(x);
}

VectorXd GigModel::gradient(const VectorXd& theta) const {
  const double x = theta(0);
  return VectorXd::Constant(1, 1.0 - 1.0 / (x * x) + 2.0 / x);
}

CCFunction GigModel::rate(const VectorXd& theta, const VectorXd& v, std::span<const Index> coords,
                          double horizon) const {
  check_coords(*this, coords);
  if (coords.empty()) return zero_cc(horizon);
  return gig_cc(theta(0), v(0), horizon);
}

GammaModel::GammaModel(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("gamma: alpha and beta must be positive");
}

double GammaModel::potential(const VectorXd& theta) const {
  const double x = theta(0);
  if (!(x > 0.0)) throw DomainError("gamma: theta must be positive");
  return beta_ * x - (alpha_ - 1.0) * std::log(x);
}

VectorXd GammaModel::gradient(const VectorXd& theta) const {
  return VectorXd::Constant(1, beta_ - (alpha_ - 1.0) / theta(0));
}

CCFunction GammaModel::rate(const VectorXd& theta, const VectorXd& v,
                            std::span<const Index> coords, double horizon) const {
  check_coords(*this, coords);
  if (coords.empty()) return zero_cc(horizon);
  return gamma_cc(theta(0), v(0), alpha_, beta_, horizon);
}

// ---- Cauchy prior ----

Polynomial cauchy_prior_poly(double theta, double v, double m, double b) {
  if (!(b >= 1.0))
    throw UnsupportedBoundError("cauchy prior: third-derivative bound requires scale >= 1");
  const double z = theta - m;
  const double q = b + z * z;
  const double f0 = 2.0 * v * z / q;
  const double f1 = 2.0 * v * v * (b - z * z) / (q * q);
  const double av = std::abs(v);
  const double derivs[2] = {f0, f1};
  return taylor_upper_bound(derivs, 3.0 * av * av * av);
}

}  // namespace ccpdmp
