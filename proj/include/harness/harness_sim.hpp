#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "harness/field.hpp"
#include "harness/lattice_kernel.hpp"
#include "harness/noise.hpp"

namespace harness {

/// One-step kernels for the height rule
///   h_{t+1}(i) = sum_k w(k) h_t(i+k) + xi_{t+1}(i)
/// and the increment rule
///   eta_{t+1}(i) = sum_k w(k) eta_t(i+k) + xi_{t+1}(i) - xi_{t+1}(i-1).
/// The convex combination is always summed in ascending offset k. A window
/// [a, b] maps to [a - kmin, b - kmax].
class HarnessStepper {
 public:
  explicit HarnessStepper(const WeightVector& w);

  void step_heights(FieldWindow& h, const NoiseRealization& noise, std::int64_t t_next);
  void step_increments(FieldWindow& eta, const NoiseRealization& noise, std::int64_t t_next);

  /// Window after `steps` steps from [first, last]; empty (last < first) when
  /// no exact site survives.
  std::pair<Site, Site> window_after(Site first, Site last, std::int64_t steps) const {
    return {first - steps * kmin_, last - steps * kmax_};
  }
  /// Initial window whose image after `steps` steps is [lo, hi].
  std::pair<Site, Site> window_before(Site lo, Site hi, std::int64_t steps) const {
    return {lo + steps * kmin_, hi + steps * kmax_};
  }

 private:
  void average(const FieldWindow& in, Eigen::VectorXd& out) const;

  Site kmin_;
  Site kmax_;
  std::vector<std::pair<Eigen::Index, double>> taps_;  // (k - kmin, w(k)) for w(k) > 0
  Eigen::VectorXd scratch_;
  std::vector<double> row_;
};

/// T steps of the height rule from time t0 (noise rows t0+1 .. t0+T).
/// Returns the full exact window; throws WindowTooSmall if none survives.
FieldWindow evolve(const FieldWindow& h0, const WeightVector& w, const NoiseRealization& noise,
                   std::int64_t T, std::int64_t t0 = 0);
/// As above, cropped to [report_first, report_last]; throws WindowTooSmall
/// when the exact region does not cover it.
FieldWindow evolve(const FieldWindow& h0, const WeightVector& w, const NoiseRealization& noise,
                   std::int64_t T, Site report_first, Site report_last, std::int64_t t0 = 0);

FieldWindow increment_evolve(const FieldWindow& eta0, const WeightVector& w,
                             const NoiseRealization& noise, std::int64_t T, std::int64_t t0 = 0);

/// h_T(site) = sum_j p^T(site,j) h0(j) + sum_{k=1..T} sum_j p^{T-k}(site,j) xi_k(j),
/// from exact transition powers. Throws WindowTooSmall unless h0 covers the
/// support of p^T(site, .).
double dual_representation(const FieldWindow& h0, const WeightVector& w,
                           const NoiseRealization& noise, std::int64_t T, Site site,
                           std::int64_t t0 = 0);

using Profile = std::function<double(double)>;

/// sup over x = j/n, |x| <= R of |h_{floor(nt)}(floor(nx))/n - u(x - bt)|
/// for a run started from h0(i) = n u(i/n).
double hydrodynamic_profile_error(const Profile& u, const WeightVector& w, const NoiseSpec& noise,
                                  std::int64_t n, double t, double R, std::uint64_t seed);

/// Draws a field on [first, last] from a seed.
using FieldGenerator = std::function<FieldWindow(Site first, Site last, std::uint64_t seed)>;

struct CouplingPoint {
  std::int64_t T = 0;
  double mean_abs_diff = 0.0;
  double std_error = 0.0;
};

/// Evolves two increment fields under one shared noise realization per
/// replica and reports the replica mean of |eta1_T(0) - eta2_T(0)|.
std::vector<CouplingPoint> coupling_decay(const FieldGenerator& first_law,
                                          const FieldGenerator& second_law, const WeightVector& w,
                                          const NoiseSpec& noise, const std::vector<std::int64_t>& T_list,
                                          std::size_t replicas, std::uint64_t seed, unsigned workers = 1);

/// i.i.d. field of the given family scaled to variance `variance`, shifted by `mean`.
FieldGenerator iid_field(NoiseFamily family, double variance, double mean = 0.0);

}  // namespace harness
