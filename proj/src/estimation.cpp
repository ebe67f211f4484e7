#include "ccpdmp/estimation.hpp"

#include <unsupported/Eigen/FFT>
#include <cmath>
#include <complex>
#include <vector>

#include "ccpdmp/errors.hpp"

namespace ccpdmp {

namespace {

void check_span(const Skeleton& sk) {
  if (sk.size() < 2) throw DomainError("skeleton needs at least two events");
  if (!(sk.duration() > 0.0)) throw DomainError("skeleton spans zero time");
}

}  // namespace

MatrixXd discretize(const Skeleton& sk, Index m) {
  check_span(sk);
  if (m < 1) throw DomainError("discretize: M must be >= 1");
  const double t1 = sk.time(0);
  const double tn = sk.time(sk.size() - 1);
  const double s = (tn - t1) / static_cast<double>(m);
  MatrixXd out(m, sk.width());
  std::size_t seg = 0;
  for (Index j = 1; j <= m; ++j) {
    const double t = j == m ? tn : t1 + static_cast<double>(j) * s;
    while (seg + 1 < sk.size() && sk.time(seg + 1) <= t) ++seg;
    const double dt = t - sk.time(seg);
    out.row(j - 1) = (sk.position(seg) + dt * sk.velocity(seg)).transpose();
  }
  return out;
}

double path_integral_mean(const Skeleton& sk, PathFunction g, Index j) {
  check_span(sk);
  if (j < 0 || j >= sk.width()) throw DomainError("path_integral_mean: coordinate out of range");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < sk.size(); ++i) {
    const double d = sk.time(i + 1) - sk.time(i);
    const double x = sk.position(i)(j);
    const double v = sk.velocity(i)(j);
    switch (g) {
      case PathFunction::Coordinate:
        total += x * d + 0.5 * v * d * d;
        break;
      case PathFunction::Square:
        total += x * x * d + x * v * d * d + v * v * d * d * d / 3.0;
        break;
    }
  }
  return total / sk.duration();
}

VectorXd path_integral_mean(const Skeleton& sk, PathFunction g) {
  VectorXd out(sk.width());
  for (Index j = 0; j < sk.width(); ++j) out(j) = path_integral_mean(sk, g, j);
  return out;
}

VectorXd autocorrelation(std::span<const double> x, Index max_lag) {
  const Index n = static_cast<Index>(x.size());
  if (n < 2) throw DomainError("autocorrelation: need at least two samples");
  double mean = 0.0;
  for (double xi : x) mean += xi;
  mean /= static_cast<double>(n);
  std::size_t len = 1;
  while (len < 2 * x.size()) len <<= 1;
  std::vector<double> padded(len, 0.0);
  for (Index i = 0; i < n; ++i) padded[i] = x[i] - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, padded);
  for (auto& c : spec) c = std::norm(c);
  std::vector<double> acov;
  fft.inv(acov, spec);
  if (!(acov[0] > 0.0)) throw DegenerateSeriesError("autocorrelation: constant series");
  max_lag = std::min(max_lag, n - 1);
  VectorXd rho(max_lag + 1);
  for (Index k = 0; k <= max_lag; ++k) rho(k) = acov[k] / acov[0];
  return rho;
}

double ess(std::span<const double> x) {
  const Index n = static_cast<Index>(x.size());
  if (n < 10) throw DomainError("ess: need at least 10 samples");
  double lo = x[0];
  double hi = x[0];
  for (double xi : x) {
    if (!std::isfinite(xi)) throw DomainError("ess: non-finite sample");
    lo = std::min(lo, xi);
    hi = std::max(hi, xi);
  }
  if (lo == hi) throw DegenerateSeriesError("ess: constant series");
  const VectorXd rho = autocorrelation(x, n - 1);
  // Geyer: Gamma_m = rho_{2m} + rho_{2m+1}, summed while positive.
  double sum_gamma = 0.0;
  for (Index m = 0; 2 * m + 1 < rho.size(); ++m) {
    const double gamma = rho(2 * m) + rho(2 * m + 1);
    if (!(gamma > 0.0)) break;
    sum_gamma += gamma;
  }
  const double tau = std::max(-1.0 + 2.0 * sum_gamma, 1.0 / static_cast<double>(n));
  return static_cast<double>(n) / tau;
}

double ess(const VectorXd& samples) {
  return ess(std::span<const double>(samples.data(), static_cast<std::size_t>(samples.size())));
}

}  // namespace ccpdmp
