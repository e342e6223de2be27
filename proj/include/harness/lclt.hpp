#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "harness/lattice_kernel.hpp"

namespace harness {

/// nbar^t(x) = (2 pi sigma1^2 t)^{-1/2} exp(-(x - t wbar)^2 / (2 t sigma1^2))
double gaussian_transition(const WeightVector& w, std::int64_t t, Site x);

struct ErrorProfile {
  std::vector<std::int64_t> t_grid;
  std::vector<double> sup_errors;   // sup_x |p^t(x) - nbar^t(x)|
  std::vector<double> scaled;       // t * sup_err
  std::vector<double> grad_errors;  // sup_x |grad p^t(x) - grad nbar^t(x)|, grad f(x) = f(x+1) - f(x)
  std::vector<double> grad_scaled;  // t^{3/2} * grad_err
  double fitted_slope = 0.0;        // log-log slope of sup_err
  double grad_slope = 0.0;

  void write_csv(std::ostream& os) const;
};

/// Exact powers against the Gaussian approximant. The supremum runs over the
/// support of p^t widened by a 3 sigma sqrt(t) margin; beyond it p^t = 0 and
/// the Gaussian's own edge value bounds the error, which is folded in.
/// Throws BudgetExceeded for t > 2^13.
ErrorProfile lclt_error_profile(const WeightVector& w, const std::vector<std::int64_t>& t_grid);

struct GreenSumRow {
  std::int64_t n = 0;
  double finite_sum = 0.0;  // n^{-1/2} sum_{k < floor(nt)} P(S_k = floor(a sqrt n))
  double limit = 0.0;       // (1/sigma^2) int_0^{sigma^2 t} (2 pi v)^{-1/2} e^{-a^2/2v} dv
};

/// Throws MeanNotZero or SpanNotOne.
std::vector<GreenSumRow> green_sum_convergence(const LatticeDistribution& d, double t, double a,
                                               const std::vector<std::int64_t>& n_grid);
double green_sum_limit(double sigma_sq, double t, double a);

struct CharFunctionBound {
  /// min over the grid of (1 - |phi~(theta)|) / theta^2
  double b = 0.0;
  int grid_points = 0;
  /// |phi~| <= 1 - b theta^2 pointwise on the fitting grid
  bool holds_on_grid = false;
  /// 0.99 b re-checked on a shifted grid that shares no points with the first
  bool holds_off_grid = false;
};

CharFunctionBound char_function_bound(const WeightVector& w, int grid_points = 10000);

struct ErfcSandwichRow {
  double r = 0.0;
  double lower = 0.0;  // 1/(r + sqrt(r^2 + 2))
  double value = 0.0;  // e^{r^2} int_r^inf e^{-s^2} ds
  double upper = 0.0;  // 1/(r + sqrt(r^2 + 4/pi))
  bool pass = false;
};

std::vector<ErfcSandwichRow> erfc_sandwich(const std::vector<double>& r_grid);

}  // namespace harness
