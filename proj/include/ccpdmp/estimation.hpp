#pragma once

#include <Eigen/Dense>
#include <span>

#include "ccpdmp/skeleton.hpp"

namespace ccpdmp {

using Eigen::MatrixXd;

/// Positions at t_1 + j s, j = 1..M, s = (t_n - t_1) / M; one row per sample,
/// one column per recorded coordinate.
MatrixXd discretize(const Skeleton& skeleton, Index m);

enum class PathFunction { Coordinate, Square };

/// Time average of g(theta_j) along the piecewise-linear path; `j` indexes the
/// recorded coordinates.
double path_integral_mean(const Skeleton& skeleton, PathFunction g, Index j);
/// Same for every recorded coordinate.
VectorXd path_integral_mean(const Skeleton& skeleton, PathFunction g);

/// N / (1 + 2 sum rho_k), truncated with Geyer's initial positive sequence.
double ess(std::span<const double> samples);
double ess(const VectorXd& samples);

/// Empirical autocorrelations rho_0..rho_{max_lag} (FFT based).
VectorXd autocorrelation(std::span<const double> samples, Index max_lag);

}  // namespace ccpdmp
