#pragma once

#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "ccpdmp/cc_envelope.hpp"

namespace ccpdmp {

/// Dense polynomial in time, coefficient i multiplying t^i.
class Polynomial {
 public:
  static constexpr int kMaxDegree = 16;

  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);
  Polynomial(std::initializer_list<double> coeffs) : Polynomial(std::vector<double>(coeffs)) {}

  static Polynomial constant(double c) { return Polynomial({c}); }
  /// a + b t
  static Polynomial affine(double a, double b) { return Polynomial({a, b}); }

  const std::vector<double>& coeffs() const { return coeffs_; }
  double coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : 0.0; }
  /// Degree after dropping trailing zeros; the zero polynomial has degree 0.
  int degree() const;
  bool is_zero() const;

  /// Horner evaluation, highest degree first.
  double operator()(double t) const;
  Polynomial derivative() const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
  friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
  friend Polynomial operator*(Polynomial p, double s) { return p *= s; }
  friend Polynomial operator*(double s, Polynomial p) { return p *= s; }
  friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
  /// Equality up to trailing zeros.
  friend bool operator==(const Polynomial& lhs, const Polynomial& rhs);

 private:
  void check();
  std::vector<double> coeffs_{0.0};
};

inline double eval(const Polynomial& p, double t) { return p(t); }
inline Polynomial deriv(const Polynomial& p) { return p.derivative(); }

struct ConcaveConvexSplit {
  Polynomial convex;   ///< a_0 plus all positive higher-order terms
  Polynomial concave;  ///< all negative higher-order terms
};

/// Sign split: convex on t >= 0 and concave on t >= 0 respectively.
ConcaveConvexSplit split_concave_convex(const Polynomial& p);

/// sum_{j<=k} f^(j)(0) t^j / j!  +  M t^(k+1) / (k+1)!
/// `derivs_at_0` holds f(0), ..., f^(k)(0).
Polynomial taylor_upper_bound(std::span<const double> derivs_at_0, double bound_m);

/// Interpolant through `samples` shifted up by horizon^n M / n!, n = samples.size().
Polynomial lagrange_upper_bound(std::span<const std::pair<double, double>> samples, double bound_m,
                                double horizon);

/// Decomposition with f_u, f_n the sign-split parts of `p`.
CCFunction poly_to_cc(const Polynomial& p, double horizon);

/// As poly_to_cc, for a polynomial that only bounds `target` from above.
CCFunction poly_bound_to_cc(const Polynomial& bound, double horizon, ScalarFunction target);

}  // namespace ccpdmp
