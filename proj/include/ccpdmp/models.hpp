#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccpdmp/cc_envelope.hpp"
#include "ccpdmp/glm.hpp"
#include "ccpdmp/polynomial.hpp"
#include "ccpdmp/superposition.hpp"

namespace ccpdmp {

/// Target density exp(-U) together with the rate factories the samplers need.
///
/// `rate(theta, v, coords, horizon)` decomposes
///   f(t) = sum_{k in coords} v_k d/dtheta_k U(theta + t v)
/// on [0, horizon). It may only read theta entries listed by
/// `dependencies(k)` for k in coords; the local sampler relies on this.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;
  virtual Index dimension() const = 0;
  virtual double potential(const VectorXd& theta) const = 0;
  virtual VectorXd gradient(const VectorXd& theta) const = 0;
  /// d/dtheta_k U, reading only dependencies(k).
  virtual double partial(const VectorXd& theta, Index k) const { return gradient(theta)(k); }
  /// Sorted coordinates read by d/dtheta_k U. Default: all.
  virtual std::vector<Index> dependencies(Index k) const;
  virtual std::optional<double> lower_bound(Index) const { return std::nullopt; }

  virtual CCFunction rate(const VectorXd& theta, const VectorXd& v, std::span<const Index> coords,
                          double horizon) const = 0;

  /// Additive terms of the full rate that each have closed-form arrivals.
  virtual bool has_superposition_terms() const { return false; }
  virtual std::vector<ClockTerm> superposition_terms(const VectorXd& theta,
                                                     const VectorXd& v) const;

  std::vector<std::optional<double>> lower_bounds() const;
  /// v . grad U(theta + t v) evaluated directly.
  double directional_derivative(const VectorXd& theta, const VectorXd& v, double t) const;
  /// All coordinates 0..p-1.
  std::vector<Index> all_coordinates() const;
};

using ModelPtr = std::shared_ptr<const Model>;

/// Independent N(0, sigma^2) coordinates, optionally truncated to theta >= 0.
class GaussianModel final : public Model {
 public:
  explicit GaussianModel(Index dim, double variance = 1.0, bool truncated = false);
  std::string name() const override { return truncated_ ? "half_gaussian" : "gaussian"; }
  Index dimension() const override { return dim_; }
  double potential(const VectorXd& theta) const override;
  VectorXd gradient(const VectorXd& theta) const override;
  double partial(const VectorXd& theta, Index k) const override;
  std::vector<Index> dependencies(Index k) const override { return {k}; }
  std::optional<double> lower_bound(Index) const override;
  CCFunction rate(const VectorXd& theta, const VectorXd& v, std::span<const Index> coords,
                  double horizon) const override;

 private:
  Index dim_;
  double variance_;
  bool truncated_;
};

/// U = (theta_1 - 1)^2 + kappa (theta_2 - theta_1^2)^2.
class BananaModel final : public Model {
 public:
  explicit BananaModel(double kappa = 1.0);
  std::string name() const override { return "banana"; }
  Index dimension() const override { return 2; }
  double potential(const VectorXd& theta) const override;
  VectorXd gradient(const VectorXd& theta) const override;
  CCFunction rate(const VectorXd& theta, const VectorXd& v, std::span<const Index> coords,
                  double horizon) const override;
  double kappa() const { return kappa_; }

 private:
  double kappa_;
};

/// Exact time polynomial of v_k d/dtheta_k U for the banana target (k = 0 or 1).
Polynomial banana_rate_poly(const VectorXd& theta, const VectorXd& v, double kappa, Index k);

/// Bayesian GLM: sum_i phi(x_i^T theta, y_i) plus independent Gaussian priors.
/// Rates are Taylor upper bounds of the given order; thinning accepts against
/// the exact rate.
class GlmModel final : public Model {
 public:
  GlmModel(GLMData data, int order);
  std::string name() const override { return "glm_" + std::string(data_.family.name()); }
  Index dimension() const override { return data_.p(); }
  double potential(const VectorXd& theta) const override;
  VectorXd gradient(const VectorXd& theta) const override;
  CCFunction rate(const VectorXd& theta, const VectorXd& v, std::span<const Index> coords,
                  double horizon) const override;
  const GLMData& data() const { return data_; }
  int order() const { return order_; }

 private:
  GLMData data_;
  int order_;
};

/// One term c exp(r t) of a rate.
struct ExpTerm {
  double c = 0.0;
  double r = 0.0;
};

/// f(t) = intercept + slope t + sum c_i exp(r_i t); terms with c > 0 are
/// convex, terms with c < 0 concave.
CCFunction affine_exp_cc(double intercept, double slope, std::vector<ExpTerm> terms,
                         double horizon);

/// Poisson mean-field coordinate with a N(0, 1) prior:
/// f(t) = v_k (theta_k + v_k t) - y_k v_k + v_k exp(theta_k + v_k t).
CCFunction poisson_field_cc(double theta_k, double v_k, double y_k, double horizon);

/// y_k ~ Poisson(exp(theta_k)), theta_k ~ N(0, 1) independently.
class PoissonFieldModel final : public Model {
 public:
  explicit PoissonFieldModel(VectorXd y);
  std::string name() const override { return "poisson_field"; }
  Index dimension() const override { return y_.size(); }
  double potential(const VectorXd& theta) const override;
  VectorXd gradient(const VectorXd& theta) const override;
  double partial(const VectorXd& theta, Index k) const override;
  std::vector<Index> dependencies(Index k) const override { return {k}; }
  CCFunction rate(const VectorXd& theta, const VectorXd& v, std::span<const Index> coords,
                  double horizon) const override;
  bool has_superposition_terms() const override { return true; }
  std::vector<ClockTerm> superposition_terms(const VectorXd& theta,
                                             const VectorXd& v) const override;
  const VectorXd& y() const { return y_; }

  /// theta_i ~ N(0, 1), y_i ~ Poisson(exp(theta_i)).
  static VectorXd simulate_data(Index n, std::uint64_t seed);

 private:
  VectorXd y_;
};

/// d/dtheta_k of sum_i (exp(theta_i) - y_i theta_i) plus the stationary AR(1)
/// prior (1 - rho^2) theta_1^2 / 2 + sum_{i>1} (theta_i - rho theta_{i-1})^2 / 2.
double poisson_ar1_grad(const VectorXd& theta, const VectorXd& y, double rho, Index k);

class PoissonAr1Model final : public Model {
 public:
  PoissonAr1Model(VectorXd y, double rho);
  std::string name() const override { return "poisson_ar1"; }
  Index dimension() const override { return y_.size(); }
  double potential(const VectorXd& theta) const override;
  VectorXd gradient(const VectorXd& theta) const override;
  double partial(const VectorXd& theta, Index k) const override;
  std::vector<Index> dependencies(Index k) const override;
  CCFunction rate(const VectorXd& theta, const VectorXd& v, std::span<const Index> coords,
                  double horizon) const override;
  double rho() const { return rho_; }

  /// Data simulated from the model: theta from the AR(1) prior, y ~ Poisson(exp(theta)).
  static VectorXd simulate_data(Index n, double rho, std::uint64_t seed);

 private:
  // Linear (prior) part of the k-th partial derivative applied to x.
  double prior_linear(const VectorXd& x, Index k) const;
  VectorXd y_;
  double rho_;
};

/// Decomposition of v d/dtheta [theta + 1/theta + 2 log theta] at theta + v t.
CCFunction gig_cc(double theta, double v, double horizon);
/// Decomposition of v d/dtheta [beta theta - (alpha - 1) log theta] at theta + v t.
CCFunction gamma_cc(double theta, double v, double alpha, double beta, double horizon);

/// One-dimensional density proportional to exp(-theta - 1/theta) / theta^2 on theta > 0.
class GigModel final : public Model {
 public:
  std::string name() const override { return "gig"; }
  Index dimension() const override { return 1; }
  double potential(const VectorXd& theta) const override;
  VectorXd gradient(const VectorXd& theta) const override;
  std::optional<double> lower_bound(Index) const override { return 0.0; }
  CCFunction rate(const VectorXd& theta, const VectorXd& v, std::span<const Index> coords,
                  double horizon) const override;
};

/// Gamma(alpha, beta) density on theta > 0.
class GammaModel final : public Model {
 public:
  GammaModel(double alpha, double beta);
  std::string name() const override { return "gamma"; }
  Index dimension() const override { return 1; }
  double potential(const VectorXd& theta) const override;
  VectorXd gradient(const VectorXd& theta) const override;
  std::optional<double> lower_bound(Index) const override { return 0.0; }
  CCFunction rate(const VectorXd& theta, const VectorXd& v, std::span<const Index> coords,
                  double horizon) const override;

 private:
  double alpha_;
  double beta_;
};

/// Second-order Taylor bound of v d/dtheta log(1 + (theta - m)^2 / b) at theta + v t.
Polynomial cauchy_prior_poly(double theta, double v, double m, double b);

}  // namespace ccpdmp
