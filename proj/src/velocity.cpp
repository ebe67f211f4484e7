#include <cmath>
#include <string>

#include "ccpdmp/kernels.hpp"

namespace ccpdmp {

VelocitySpace parse_velocity_space(std::string_view name) {
  if (name == "gaussian") return VelocitySpace::Gaussian;
  if (name == "unit-sphere" || name == "sphere") return VelocitySpace::UnitSphere;
  if (name == "zigzag") return VelocitySpace::ZigZag;
  throw DomainError("unknown velocity space '" + std::string(name) + "'");
}

std::string_view to_string(VelocitySpace space) {
  switch (space) {
    case VelocitySpace::Gaussian: return "gaussian";
    case VelocitySpace::UnitSphere: return "unit-sphere";
    case VelocitySpace::ZigZag: return "zigzag";
  }
  return "?";
}

VectorXd refresh_velocity(Rng& rng, Index dim, VelocitySpace space) {
  if (dim < 1) throw DomainError("refresh_velocity: dimension must be >= 1");
  VectorXd v(dim);
  switch (space) {
    case VelocitySpace::ZigZag:
      for (Index i = 0; i < dim; ++i) v(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
      return v;
    case VelocitySpace::Gaussian:
      for (Index i = 0; i < dim; ++i) v(i) = rng.normal();
      return v;
    case VelocitySpace::UnitSphere: {
      double norm = 0.0;
      do {
        for (Index i = 0; i < dim; ++i) v(i) = rng.normal();
        norm = v.norm();
      } while (!(norm > 0.0));
      return v / norm;
    }
  }
  return v;
}

std::optional<BoundaryHit> boundary_hit_time(const VectorXd& theta, const VectorXd& v,
                                             std::span<const std::optional<double>> lower_bounds) {
  if (static_cast<Index>(lower_bounds.size()) != theta.size() || theta.size() != v.size()) {
    throw DomainError("boundary_hit_time: dimension mismatch");
  }
  std::optional<BoundaryHit> best;
  for (Index k = 0; k < theta.size(); ++k) {
    const auto& lb = lower_bounds[static_cast<std::size_t>(k)];
    if (!lb) continue;
    const double gap = theta(k) - *lb;
    if (gap < 0.0 || (gap == 0.0 && v(k) <= 0.0)) {
      throw DomainError("boundary_hit_time: coordinate " + std::to_string(k) +
                        " is on or outside its bound");
    }
    if (v(k) >= 0.0) continue;
    const double t = gap / -v(k);
    if (!best || t < best->time) best = BoundaryHit{t, k};
  }
  return best;
}

}  // namespace ccpdmp
