#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include <Eigen/Core>

namespace harness::stats {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

/// Sample mean with the standard error sd / sqrt(n).
inline Estimate mean_estimate(std::span<const double> x) {
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double n = static_cast<double>(x.size());
  const double var = x.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {m, std::sqrt(var / n)};
}

/// Sample covariance (divisor n - 1) and its standard error, estimated from
/// the spread of the centered products.
inline Estimate covariance_estimate(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const double mx = mean(x);
  const double my = mean(y);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (x[i] - mx) * (y[i] - my);
  const double nn = static_cast<double>(n);
  const double cov = n > 1 ? s / (nn - 1.0) : 0.0;
  const double prod_mean = s / nn;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (x[i] - mx) * (y[i] - my) - prod_mean;
    ss += d * d;
  }
  const double prod_var = n > 1 ? ss / (nn - 1.0) : 0.0;
  return {cov, std::sqrt(prod_var / nn)};
}

inline Estimate variance_estimate(std::span<const double> x) { return covariance_estimate(x, x); }

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LineFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double mx = x.mean();
  const double my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

/// Slope of log(y) against log(x).
inline double log_log_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return fit_line(x.array().log().matrix(), y.array().log().matrix()).slope;
}

}  // namespace harness::stats
