#include "ccpdmp/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "ccpdmp/errors.hpp"

namespace ccpdmp {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  check();
}

void Polynomial::check() {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw DomainError("polynomial coefficients must be finite");
  }
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (static_cast<int>(coeffs_.size()) - 1 > kMaxDegree) {
    throw DomainError("polynomial degree exceeds cap of " + std::to_string(kMaxDegree));
  }
}

int Polynomial::degree() const { return static_cast<int>(coeffs_.size()) - 1; }

bool Polynomial::is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

double Polynomial::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = static_cast<double>(i) * coeffs_[i];
  return Polynomial(std::move(d));
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), 0.0);
  for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  check();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) { return *this += rhs * -1.0; }

Polynomial& Polynomial::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  check();
  return *this;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
  std::vector<double> out(lhs.coeffs_.size() + rhs.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < lhs.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) out[i + j] += lhs.coeffs_[i] * rhs.coeffs_[j];
  }
  return Polynomial(std::move(out));
}

bool operator==(const Polynomial& lhs, const Polynomial& rhs) { return lhs.coeffs_ == rhs.coeffs_; }

ConcaveConvexSplit split_concave_convex(const Polynomial& p) {
  const auto& c = p.coeffs();
  std::vector<double> convex(c.size(), 0.0);
  std::vector<double> concave(c.size(), 0.0);
  convex[0] = c[0];
  for (std::size_t i = 1; i < c.size(); ++i) (c[i] > 0.0 ? convex : concave)[i] = c[i];
  return {Polynomial(std::move(convex)), Polynomial(std::move(concave))};
}

Polynomial taylor_upper_bound(std::span<const double> derivs_at_0, double bound_m) {
  if (derivs_at_0.empty()) throw DomainError("taylor_upper_bound needs f(0)");
  if (!(bound_m >= 0.0)) throw DomainError("taylor_upper_bound: M must be nonnegative");
  std::vector<double> c(derivs_at_0.size() + 1);
  double factorial = 1.0;
  for (std::size_t j = 0; j < derivs_at_0.size(); ++j) {
    if (j > 0) factorial *= static_cast<double>(j);
    c[j] = derivs_at_0[j] / factorial;
  }
  factorial *= static_cast<double>(derivs_at_0.size());
  c.back() = bound_m / factorial;
  return Polynomial(std::move(c));
}

Polynomial lagrange_upper_bound(std::span<const std::pair<double, double>> samples, double bound_m,
                                double horizon) {
  if (samples.empty()) throw DomainError("lagrange_upper_bound needs samples");
  if (!(bound_m >= 0.0)) throw DomainError("lagrange_upper_bound: M must be nonnegative");
  const std::size_t n = samples.size();
  std::vector<double> xs(n);
  std::vector<double> dd(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = samples[i].first;
    dd[i] = samples[i].second;
    if (xs[i] < 0.0 || xs[i] > horizon) throw DomainError("lagrange sample outside [0, horizon]");
    for (std::size_t j = 0; j < i; ++j) {
      if (xs[j] == xs[i]) throw DomainError("lagrange_upper_bound: duplicate abscissae");
    }
  }
  // Newton divided differences, then expand the nested form.
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
    }
  }
  Polynomial result = Polynomial::constant(dd[n - 1]);
  for (std::size_t i = n - 1; i-- > 0;) {
    result = result * Polynomial::affine(-xs[i], 1.0) + Polynomial::constant(dd[i]);
  }
  double shift = bound_m;
  for (std::size_t i = 1; i <= n; ++i) shift *= horizon / static_cast<double>(i);
  return result + Polynomial::constant(shift);
}

namespace {

CCFunction split_to_cc(const Polynomial& p, double horizon) {
  if (!(horizon > 0.0)) throw DomainError("poly_to_cc: horizon must be positive");
  auto parts = std::make_shared<const ConcaveConvexSplit>(split_concave_convex(p));
  auto concave_deriv = std::make_shared<const Polynomial>(parts->concave.derivative());
  CCFunction cc;
  cc.horizon = horizon;
  cc.eval_convex = [parts](double t) { return parts->convex(t); };
  cc.eval_concave = [parts](double t) { return parts->concave(t); };
  cc.eval_concave_deriv = [concave_deriv](double t) { return (*concave_deriv)(t); };
  return cc;
}

}  // namespace

CCFunction poly_to_cc(const Polynomial& p, double horizon) {
  CCFunction cc = split_to_cc(p, horizon);
  cc.affine_exact = p.degree() <= 1;
  return cc;
}

CCFunction poly_bound_to_cc(const Polynomial& bound, double horizon, ScalarFunction target) {
  CCFunction cc = split_to_cc(bound, horizon);
  cc.eval_target = std::move(target);
  return cc;
}

}  // namespace ccpdmp
