#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string_view>

#include "ccpdmp/errors.hpp"
#include "ccpdmp/random.hpp"

namespace ccpdmp {

using Eigen::Index;
using Eigen::VectorXd;

/// Velocity with component i negated (0-based).
template <typename Derived>
typename Derived::PlainObject flip(const Eigen::MatrixBase<Derived>& v, Index i) {
  if (i < 0 || i >= v.size()) throw DomainError("flip: index out of range");
  typename Derived::PlainObject out = v;
  out(i) = -out(i);
  return out;
}

/// v - 2 <v, g> / |g|^2 g
template <typename DerivedV, typename DerivedG>
typename DerivedV::PlainObject reflect_full(const Eigen::MatrixBase<DerivedV>& v,
                                            const Eigen::MatrixBase<DerivedG>& grad) {
  if (v.size() != grad.size()) throw DomainError("reflect_full: dimension mismatch");
  const auto norm2 = grad.squaredNorm();
  if (!(norm2 > 0)) throw DegenerateReflectionError("reflection against a zero gradient");
  return v - (2 * v.dot(grad) / norm2) * grad;
}

/// Reflection of the sub-vector indexed by `subset`; other components unchanged.
template <typename DerivedV, typename DerivedG>
typename DerivedV::PlainObject reflect_subset(const Eigen::MatrixBase<DerivedV>& v,
                                              const Eigen::MatrixBase<DerivedG>& grad,
                                              std::span<const Index> subset) {
  if (v.size() != grad.size()) throw DomainError("reflect_subset: dimension mismatch");
  typename DerivedV::Scalar dot = 0;
  typename DerivedV::Scalar norm2 = 0;
  for (Index k : subset) {
    if (k < 0 || k >= v.size()) throw DomainError("reflect_subset: index out of range");
    dot += v(k) * grad(k);
    norm2 += grad(k) * grad(k);
  }
  if (!(norm2 > 0)) throw DegenerateReflectionError("reflection against a zero sub-gradient");
  typename DerivedV::PlainObject out = v;
  const auto scale = 2 * dot / norm2;
  for (Index k : subset) out(k) -= scale * grad(k);
  return out;
}

enum class VelocitySpace { Gaussian, UnitSphere, ZigZag };

VelocitySpace parse_velocity_space(std::string_view name);
std::string_view to_string(VelocitySpace space);

/// Fresh velocity from the invariant velocity law of `space`.
VectorXd refresh_velocity(Rng& rng, Index dim, VelocitySpace space);

struct BoundaryHit {
  double time = 0.0;
  Index index = 0;
};

/// Earliest t > 0 at which a bounded coordinate of theta + t v reaches its
/// lower bound. A coordinate sitting on its bound and moving inward is allowed.
std::optional<BoundaryHit> boundary_hit_time(const VectorXd& theta, const VectorXd& v,
                                             std::span<const std::optional<double>> lower_bounds);

}  // namespace ccpdmp
