#include "ccpdmp/glm.hpp"

#include <cmath>
#include <string>

#include "ccpdmp/errors.hpp"
#include "ccpdmp/random.hpp"

namespace ccpdmp {

namespace {

constexpr double kMixC = 0.01;  // 1 / sigma_2^2

// Weight of the N(0, 1) component given residual u.
double mixture_weight(double u) { return 1.0 / (1.0 + 0.1 * std::exp(0.495 * u * u)); }

double mixture_derivative(int order, double u) {
  const double w = mixture_weight(u);
  const double c1 = 1.0 - kMixC;
  const double s = kMixC + c1 * w;
  const double ww = w * (1.0 - w);
  switch (order) {
    case 0: {
      const double p1 = 0.5 * std::exp(-0.5 * u * u);
      const double p2 = 0.05 * std::exp(-0.005 * u * u);
      return -std::log((p1 + p2) / std::sqrt(2.0 * M_PI));
    }
    case 1:
      return u * s;
    case 2:
      return s - c1 * c1 * u * u * ww;
    case 3: {
      const double dw = -c1 * u * ww;
      return c1 * dw - c1 * c1 * (2.0 * u * ww + u * u * (1.0 - 2.0 * w) * dw);
    }
    default:
      throw DomainError("mixture family: derivative order " + std::to_string(order) +
                        " not available");
  }
}

}  // namespace

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

GlmFamily GlmFamily::cauchy(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("cauchy family: scale must be > 0");
  return GlmFamily(Kind::Cauchy, scale);
}

GlmFamily GlmFamily::from_name(std::string_view name, double cauchy_scale) {
  if (name == "logistic") return logistic();
  if (name == "poisson") return poisson();
  if (name == "cauchy") return cauchy(cauchy_scale);
  if (name == "mixture" || name == "mixture_normal") return mixture_normal();
  throw DomainError("unknown GLM family '" + std::string(name) + "'");
}

std::string_view GlmFamily::name() const {
  switch (kind_) {
    case Kind::Logistic: return "logistic";
    case Kind::Poisson: return "poisson";
    case Kind::Cauchy: return "cauchy";
    case Kind::MixtureNormal: return "mixture";
  }
  return "";
}

void GlmFamily::check_response(double y) const {
  if (!std::isfinite(y)) throw DomainError("GLM response must be finite");
  if (kind_ == Kind::Logistic && y != 0.0 && y != 1.0)
    throw DomainError("logistic response must be 0 or 1");
  if (kind_ == Kind::Poisson && (y < 0.0 || y != std::floor(y)))
    throw DomainError("poisson response must be a nonnegative integer");
}

double GlmFamily::derivative(int order, double a, double y) const {
  switch (kind_) {
    case Kind::Logistic: {
      const double s = sigmoid(a);
      const double r = sigmoid(-a);
      switch (order) {
        case 0: return (a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a))) - y * a;
        case 1: return y == 1.0 ? -r : s - y;
        case 2: return s * r;
        case 3: return s * r * (r - s);
        case 4: return s * r * (1.0 - 6.0 * s * r);
        default: break;
      }
      break;
    }
    case Kind::Poisson:
      if (order == 0) return std::exp(a) - y * a;
      if (order == 1) return std::exp(a) - y;
      if (order <= 4) return std::exp(a);
      break;
    case Kind::Cauchy: {
      const double b = scale_;
      const double z = a - y;
      const double q = b + z * z;
      switch (order) {
        case 0: return std::log1p(z * z / b);
        case 1: return 2.0 * z / q;
        case 2: return 2.0 * (b - z * z) / (q * q);
        case 3: return 4.0 * z * (z * z - 3.0 * b) / (q * q * q);
        default: break;
      }
      break;
    }
    case Kind::MixtureNormal:
      if (order <= 3) return mixture_derivative(order, a - y);
      break;
  }
  throw DomainError(std::string(name()) + " family: derivative order " + std::to_string(order) +
                    " not available");
}

double GlmFamily::derivative_bound(int order, double a0, double a1) const {
  switch (kind_) {
    case Kind::Logistic:
      if (order >= 2 && order <= 4) return kLogisticBounds[order - 2];
      if (order == 1) return 1.0;
      break;
    case Kind::Poisson:
      if (order >= 2) return std::exp(std::max(a0, a1));
      break;
    case Kind::Cauchy:
      if (order == 1) return 1.0 / std::sqrt(scale_);
      if (order == 2) return 2.0 / scale_;
      if (order == 3) {
        if (scale_ < 1.0)
          throw UnsupportedBoundError("cauchy family: third-derivative bound requires scale >= 1");
        return 3.0;
      }
      break;
    case Kind::MixtureNormal:
      if (order == 1) return kMixtureNormalPublishedBounds[0];
      if (order == 2 || order == 3) return kMixtureNormalCurvatureBounds[order - 2];
      break;
  }
  throw UnsupportedBoundError(std::string(name()) + " family: no bound for derivative order " +
                              std::to_string(order));
}

void GLMData::validate() const {
  if (x.rows() == 0 || x.cols() == 0) throw DomainError("GLM data: empty design matrix");
  if (y.size() != x.rows()) throw DomainError("GLM data: response length does not match rows");
  if (prior_variance.size() != x.cols())
    throw DomainError("GLM data: prior variance length does not match columns");
  if (!x.allFinite()) throw DomainError("GLM data: non-finite covariate");
  for (Index i = 0; i < y.size(); ++i) family.check_response(y(i));
  if (!(prior_variance.array() > 0.0).all() || !prior_variance.allFinite())
    throw DomainError("GLM data: prior variances must be positive");
}

Polynomial glm_taylor_rate(const GLMData& data, const VectorXd& a0, const VectorXd& slope,
                           double v_k, Index k, int order, double horizon) {
  if (order < 1 || order > 3) throw DomainError("GLM Taylor order must be 1, 2 or 3");
  if (!(horizon > 0.0)) throw DomainError("GLM Taylor bound: horizon must be positive");
  std::vector<double> derivs(order, 0.0);
  double m = 0.0;
  const auto xk = data.x.col(k);
  for (Index i = 0; i < data.n(); ++i) {
    const double xik = xk(i);
    if (xik == 0.0) continue;
    const double d = slope(i);
    double dj = 1.0;
    for (int j = 0; j < order; ++j) {
      derivs[j] += data.family.derivative(j + 1, a0(i), data.y(i)) * dj * xik;
      dj *= d;
    }
    if (dj != 0.0) {
      const double c = data.family.derivative_bound(order + 1, a0(i), a0(i) + horizon * d);
      m += c * std::abs(dj) * std::abs(xik);
    }
  }
  for (double& dj : derivs) dj *= v_k;
  return taylor_upper_bound(derivs, std::abs(v_k) * m);
}

Polynomial glm_taylor_rate(const GLMData& data, const VectorXd& theta, const VectorXd& v, Index k,
                           int order, double horizon) {
  if (k < 0 || k >= data.p()) throw DomainError("GLM Taylor bound: coordinate out of range");
  const VectorXd a0 = data.x * theta;
  const VectorXd slope = data.x * v;
  return glm_taylor_rate(data, a0, slope, v(k), k, order, horizon);
}

Polynomial gaussian_prior_rate(double theta_k, double v_k, double variance) {
  if (!(variance > 0.0)) throw DomainError("Gaussian prior: variance must be positive");
  return Polynomial::affine(v_k * theta_k / variance, v_k * v_k / variance);
}

MatrixXd logistic_precision(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("logistic design: rho must lie in [0, 1)");
  MatrixXd v = MatrixXd::Identity(5, 5);
  v(0, 1) = v(1, 0) = rho;
  return v;
}

GLMData logistic_experiment_data(double rho, std::uint64_t seed, Index n) {
  const MatrixXd cov = logistic_precision(rho).inverse();
  const MatrixXd l = cov.llt().matrixL();
  Rng rng(seed);
  GLMData data;
  data.family = GlmFamily::logistic();
  data.x.resize(n, 5);
  data.y.resize(n);
  VectorXd z(5);
  const VectorXd& truth = logistic_true_theta();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < 5; ++j) z(j) = rng.normal();
    data.x.row(i) = (l * z).transpose();
    data.y(i) = rng.uniform() < sigmoid(data.x.row(i).dot(truth)) ? 1.0 : 0.0;
  }
  data.prior_variance = VectorXd::Ones(5);
  return data;
}

}  // namespace ccpdmp
