#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string_view>

#include "ccpdmp/polynomial.hpp"

namespace ccpdmp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// GLM mapping function phi(a, y): the per-observation negative log-likelihood
/// as a function of the linear predictor a.
class GlmFamily {
 public:
  enum class Kind { Logistic, Poisson, Cauchy, MixtureNormal };

  static GlmFamily logistic() { return GlmFamily(Kind::Logistic); }
  static GlmFamily poisson() { return GlmFamily(Kind::Poisson); }
  /// Cauchy errors with scale b > 0.
  static GlmFamily cauchy(double scale);
  /// 0.5 N(0, 1) + 0.5 N(0, 10^2) errors.
  static GlmFamily mixture_normal() { return GlmFamily(Kind::MixtureNormal); }
  static GlmFamily from_name(std::string_view name, double cauchy_scale = 1.0);

  Kind kind() const { return kind_; }
  std::string_view name() const;

  /// Validates a response value for this family.
  void check_response(double y) const;

  /// phi^(order)(a, y) for order in 0..4.
  double derivative(int order, double a, double y) const;

  /// Bound on |phi^(order)(a, y)| for a between a0 and a1.
  /// Throws UnsupportedBoundError where no closed form is available.
  double derivative_bound(int order, double a0, double a1) const;

  double cauchy_scale() const { return scale_; }

 private:
  explicit GlmFamily(Kind kind, double scale = 1.0) : kind_(kind), scale_(scale) {}
  Kind kind_;
  double scale_;
};

/// Logistic bounds on |phi''|, |phi'''|, |phi''''|.
inline constexpr std::array<double, 3> kLogisticBounds{0.25, 0.096225044864937635, 0.125};

/// Published constants for the mixture family (|phi'|, |phi''|, |phi'''|).
inline constexpr std::array<double, 3> kMixtureNormalPublishedBounds{2.0, 0.91, 1.8};
/// Two-sided bounds actually used for Taylor polynomials: phi'' dips to
/// about -1.0095 near |a - y| = 2.58, below the published 0.91.
inline constexpr std::array<double, 2> kMixtureNormalCurvatureBounds{1.01, 1.8};

double sigmoid(double a);

/// Covariates, responses and an independent Gaussian prior per coordinate.
struct GLMData {
  MatrixXd x;               ///< n x p
  VectorXd y;               ///< n
  GlmFamily family = GlmFamily::logistic();
  VectorXd prior_variance;  ///< p

  Index n() const { return x.rows(); }
  Index p() const { return x.cols(); }
  void validate() const;
};

/// Taylor upper-bound polynomial (likelihood part only) of
/// f_k(t) = v_k d/dtheta_k U(theta + t v) with the given polynomial order.
Polynomial glm_taylor_rate(const GLMData& data, const VectorXd& theta, const VectorXd& v, Index k,
                           int order, double horizon);

/// Same, reusing a0 = X theta and slope = X v.
Polynomial glm_taylor_rate(const GLMData& data, const VectorXd& a0, const VectorXd& slope,
                           double v_k, Index k, int order, double horizon);

/// Affine prior contribution v_k (theta_k + v_k t) / sigma^2.
Polynomial gaussian_prior_rate(double theta_k, double v_k, double variance);

/// Design of the logistic-regression efficiency study: n = 200 draws of
/// x ~ N(0, V^-1) with V(0,1) = V(1,0) = rho, Bernoulli responses from the
/// fixed true coefficients, and N(0, 1) priors.
GLMData logistic_experiment_data(double rho, std::uint64_t seed, Index n = 200);

inline const VectorXd& logistic_true_theta() {
  static const VectorXd theta = (VectorXd(5) << -1.25, 0.5, -0.4, -0.4, -0.4).finished();
  return theta;
}

/// Precision matrix of the logistic study covariates.
MatrixXd logistic_precision(double rho);

}  // namespace ccpdmp
