#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include "harness/field.hpp"
#include "harness/lattice_kernel.hpp"
#include "harness/noise.hpp"

namespace harness {

enum class PotentialMethod { fourier, series };

std::string_view to_string(PotentialMethod m);
PotentialMethod parse_potential_method(std::string_view name);

struct PotentialOptions {
  /// absolute tolerance of each second-difference quadrature (fourier)
  double quadrature_tol = 1e-10;
  int max_panels = 20000;
  /// number of q-powers summed before giving up (series)
  std::int64_t series_max_steps = 4096;
  /// certified tail bound the series must reach; infinity accepts whatever
  /// the budget yields and only reports the bound
  double series_target = std::numeric_limits<double>::infinity();
};

/// Potential kernel a(x) = sum_k [q^k(0,0) - q^k(x,0)] of the q-walk on
/// |x| <= x_max, with its second differences D(x) = a(x-1) + a(x+1) - 2a(x)
/// on |x| <= x_max - 1. Both are even, so only x >= 0 is stored.
class PotentialTable {
 public:
  double a(Site x) const;
  double second_difference(Site x) const;
  /// Certified upper bound on a(x) minus the stored value (series method);
  /// zero for the fourier method.
  double tail_bound(Site x) const;

  Site x_max() const { return x_max_; }
  PotentialMethod method() const { return method_; }
  double sigma1_sq() const { return sigma1_sq_; }

  /// series only: the number of q-powers summed, and max_k k^{1/2} q^k(0,0)
  std::int64_t series_steps() const { return series_steps_; }
  double uniform_decay_constant() const { return decay_constant_; }

  /// max over |x| <= x_max - reach(q) of |sum_j q(j - x) a(j) - a(x) - 1{x=0}|
  double harmonicity_residual(const WeightVector& q) const;

  /// CSV "x,a,D" for x in [-x_max+1, x_max-1].
  void write_csv(std::ostream& os) const;

 private:
  friend PotentialTable potential_kernel(const WeightVector&, Site, PotentialMethod,
                                         const PotentialOptions&);
  Site x_max_ = 0;
  PotentialMethod method_ = PotentialMethod::fourier;
  double sigma1_sq_ = 0.0;
  Eigen::VectorXd a_;     // a(0..x_max)
  Eigen::VectorXd d_;     // D(0..x_max-1)
  Eigen::VectorXd tail_;  // series tail bounds, 0..x_max
  std::int64_t series_steps_ = 0;
  double decay_constant_ = 0.0;
};

/// Builds the table for the q-kernel of `w`.
///  fourier: D(x) = (1/pi) int (1 - cos t)/(1 - phi_Y(t)) e^{ixt} dt by
///           adaptive quadrature, then a(0) = 0, a(1) = D(0)/2 and
///           a(x+1) = D(x) + 2a(x) - a(x-1).
///  series:  partial sums of the defining series with the certified tail
///           bound A(x) s^{-1/2}, A(x) = d C / q^d(0,x).
/// Throws QuadratureFailure or SeriesBudgetExceeded.
PotentialTable potential_kernel(const WeightVector& w, Site x_max,
                                PotentialMethod method = PotentialMethod::fourier,
                                const PotentialOptions& options = {});

/// The integrand (1 - cos t) / (1 - phi_Y(t)) for the symmetric kernel q,
/// evaluated without cancellation; its value at t = 0 is 1/(2 sigma_1^2).
class SpectralRatio {
 public:
  explicit SpectralRatio(const WeightVector& q);
  double operator()(double theta) const;

 private:
  std::vector<std::pair<double, double>> half_;  // (x, q(x)) for x > 0
  double limit_at_zero_;
};

/// Cov(eta(0), eta(x)) = sigma_xi^2 D(x) under pi_0. Throws TableTooSmall
/// unless |x| + 1 <= x_max.
double cov0(const PotentialTable& table, double sigma_xi_sq, Site x);

/// f(t) = (sigma_xi^2/pi) (1 - cos t)/(1 - phi_Y(t)), with f(0) = sigma_xi^2/(2 pi sigma_1^2).
double spectral_density(const WeightVector& w, double sigma_xi_sq, double theta);

struct ExponentialBound {
  double A = 0.0;
  double c = 0.0;
  /// |cov| below this is treated as quadrature noise
  double floor = 0.0;
  int fitted_points = 0;
  bool holds(Site x, double value) const {
    return std::abs(value) <= std::max(A * std::exp(-c * std::abs(static_cast<double>(x))), floor);
  }
};

/// Fits |cov0(x)| <= A e^{-c|x|} on 0 <= x <= fit_max: c is 0.9 times the
/// least-squares rate of the log upper envelope above the noise floor, A the
/// smallest constant making the bound hold on the fitted lags.
ExponentialBound fit_exponential_bound(const PotentialTable& table, double sigma_xi_sq, Site fit_max,
                                       double noise_floor = 1e-9);

enum class Pi0Mode { gaussian_exact, truncated };

struct Pi0Options {
  std::optional<Pi0Mode> mode;        // default: exact for Gaussian noise, truncated otherwise
  std::int64_t truncation_K = 4096;   // truncated mode
  std::optional<double> tolerance;    // truncated mode: required L2 error bound
};

struct Pi0Sample {
  FieldWindow field;
  Pi0Mode mode = Pi0Mode::gaussian_exact;
  /// L2 bound sigma_xi sqrt(2 tail(K)) (zero in exact mode)
  double truncation_error = 0.0;
};

/// Sampler for the invariant increment law pi_0 on a fixed window.
///  gaussian_exact: Cholesky factor of the window's Toeplitz covariance
///                  cov0(i - j), banded where the factor underflows.
///  truncated:      Delta_0(i) = sum_j sum_{k<K} xi_{-k}(j)[p^k(i,j) - p^k(i-1,j)],
///                  evaluated as the increments of a flat start at time -K.
class Pi0Sampler {
 public:
  Pi0Sampler(const WeightVector& w, const NoiseSpec& noise, Site first, Site last,
             const Pi0Options& options = {});

  Pi0Sample sample(std::uint64_t seed) const;

  Pi0Mode mode() const { return mode_; }
  double truncation_error() const { return truncation_error_; }
  Site first() const { return first_; }
  Site last() const { return last_; }
  /// cov0(0..size-1) used by the exact mode
  const Eigen::VectorXd& covariance_row() const { return cov_row_; }

 private:
  WeightVector w_;
  NoiseSpec noise_;
  Site first_;
  Site last_;
  Pi0Mode mode_;
  std::int64_t K_ = 0;
  double truncation_error_ = 0.0;
  Eigen::VectorXd cov_row_;
  Eigen::MatrixXd factor_;              // lower Cholesky factor
  std::vector<Eigen::Index> band_start_;  // first non-negligible column per row
};

Pi0Sample sample_pi0(const WeightVector& w, const NoiseSpec& noise, Site first, Site last,
                     const Pi0Options& options, std::uint64_t seed);

/// sum_{k>=K} [q^k(0,0) - q^k(1,0)], from a(1) minus the partial sum.
double increment_series_tail(const WeightVector& w, std::int64_t K);

}  // namespace harness
