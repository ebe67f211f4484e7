#include "ccpdmp/skeleton.hpp"

#include <algorithm>
#include <numeric>

#include "ccpdmp/errors.hpp"

namespace ccpdmp {

Skeleton::Skeleton(Index dimension, std::vector<Index> recorded)
    : dim_(dimension), recorded_(std::move(recorded)) {
  if (dimension < 1) throw DomainError("skeleton: dimension must be >= 1");
  if (recorded_.empty()) {
    recorded_.resize(dimension);
    std::iota(recorded_.begin(), recorded_.end(), Index{0});
  }
  for (Index k : recorded_)
    if (k < 0 || k >= dimension) throw DomainError("skeleton: recorded coordinate out of range");
}

void Skeleton::push(double t, const VectorXd& theta, const VectorXd& v, EventKind kind) {
  if (!times_.empty() && t < times_.back()) throw DomainError("skeleton: time went backwards");
  times_.push_back(t);
  kinds_.push_back(kind);
  for (Index k : recorded_) {
    theta_.push_back(theta(k));
    v_.push_back(v(k));
  }
}

void Skeleton::push_recorded(double t, const double* theta, const double* v, EventKind kind) {
  if (!times_.empty() && t < times_.back()) throw DomainError("skeleton: time went backwards");
  times_.push_back(t);
  kinds_.push_back(kind);
  theta_.insert(theta_.end(), theta, theta + recorded_.size());
  v_.insert(v_.end(), v, v + recorded_.size());
}

double Skeleton::position_at(double t, Index j) const {
  if (empty()) throw DomainError("skeleton: empty");
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  const std::size_t w = recorded_.size();
  return theta_[i * w + j] + (t - times_[i]) * v_[i * w + j];
}

}  // namespace ccpdmp
