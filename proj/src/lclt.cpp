#include "harness/lclt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "harness/error.hpp"
#include "harness/quadrature.hpp"
#include "harness/stats.hpp"

namespace harness {

double gaussian_transition(const WeightVector& w, std::int64_t t, Site x) {
  if (t < 1) throw Error(ErrorKind::Validation, "gaussian approximant needs t >= 1");
  const double td = static_cast<double>(t);
  const double v = w.variance() * td;
  const double d = static_cast<double>(x) - td * w.mean();
  return std::exp(-d * d / (2.0 * v)) / std::sqrt(2.0 * std::numbers::pi * v);
}

void ErrorProfile::write_csv(std::ostream& os) const {
  os << "t,sup_err,t_sup_err,grad_err,t15_grad_err\n";
  os.precision(17);
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    os << t_grid[k] << ',' << sup_errors[k] << ',' << scaled[k] << ',' << grad_errors[k] << ','
       << grad_scaled[k] << '\n';
  }
}

ErrorProfile lclt_error_profile(const WeightVector& w, const std::vector<std::int64_t>& t_grid) {
  if (t_grid.empty()) throw Error(ErrorKind::Validation, "empty t grid");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (t_grid[k] < 1) throw Error(ErrorKind::Validation, "t grid entries must be >= 1");
    if (k > 0 && t_grid[k] <= t_grid[k - 1]) throw Error(ErrorKind::Validation, "t grid must increase");
  }
  if (t_grid.back() > (std::int64_t{1} << 13)) {
    throw Error(ErrorKind::BudgetExceeded, "LCLT profile is limited to t <= 8192");
  }

  ErrorProfile prof;
  prof.t_grid = t_grid;
  LatticeDistribution p = LatticeDistribution::dirac(0);
  std::int64_t at = 0;
  for (std::int64_t t : t_grid) {
    p = convolve(p, transition_power(w, t - at));
    at = t;
    const auto margin = static_cast<Site>(std::ceil(3.0 * std::sqrt(w.variance() * static_cast<double>(t))));
    const Site lo = p.first() - margin;
    const Site hi = p.last() + margin;
    // outside [lo, hi] the error is the Gaussian itself, largest at the edges
    double sup = std::max(gaussian_transition(w, t, lo - 1), gaussian_transition(w, t, hi + 1));
    double grad = sup;
    double prev = p(lo - 1) - gaussian_transition(w, t, lo - 1);
    for (Site x = lo; x <= hi + 1; ++x) {
      const double e = p(x) - gaussian_transition(w, t, x);
      if (x <= hi) sup = std::max(sup, std::abs(e));
      grad = std::max(grad, std::abs(e - prev));
      prev = e;
    }
    const double td = static_cast<double>(t);
    prof.sup_errors.push_back(sup);
    prof.scaled.push_back(td * sup);
    prof.grad_errors.push_back(grad);
    prof.grad_scaled.push_back(td * std::sqrt(td) * grad);
  }
  if (t_grid.size() >= 2) {
    Eigen::VectorXd tx(static_cast<Eigen::Index>(t_grid.size()));
    for (std::size_t k = 0; k < t_grid.size(); ++k) tx[static_cast<Eigen::Index>(k)] = static_cast<double>(t_grid[k]);
    prof.fitted_slope = stats::log_log_slope(tx, Eigen::Map<Eigen::VectorXd>(prof.sup_errors.data(), tx.size()));
    prof.grad_slope = stats::log_log_slope(tx, Eigen::Map<Eigen::VectorXd>(prof.grad_errors.data(), tx.size()));
  }
  return prof;
}

double green_sum_limit(double sigma_sq, double t, double a) {
  if (!(sigma_sq > 0.0) || t < 0.0) throw Error(ErrorKind::Validation, "green sum limit needs sigma^2 > 0, t >= 0");
  const double top = std::sqrt(sigma_sq * t);
  if (top == 0.0) return 0.0;
  const double c = 2.0 / std::sqrt(2.0 * std::numbers::pi) / sigma_sq;
  if (a == 0.0) return c * top;
  // v = u^2
  const double a2 = a * a;
  auto f = [a2](double u) { return u == 0.0 ? 0.0 : std::exp(-0.5 * a2 / (u * u)); };
  const auto res = quad::integrate(f, 0.0, top, {1e-13, 0.0, 4000}, 8);
  if (!res.converged) throw Error(ErrorKind::QuadratureFailure, "green sum limit");
  return c * res.value;
}

std::vector<GreenSumRow> green_sum_convergence(const LatticeDistribution& d, double t, double a,
                                               const std::vector<std::int64_t>& n_grid) {
  if (std::abs(d.mean()) > 1e-12) throw Error(ErrorKind::MeanNotZero, "green sum needs a mean-zero step law");
  if (support_span(d) != 1) throw Error(ErrorKind::SpanNotOne, "green sum needs a span-1 step law");
  const double sigma_sq = d.variance();
  const double limit = green_sum_limit(sigma_sq, t, a);
  std::vector<GreenSumRow> rows;
  for (std::int64_t n : n_grid) {
    if (n < 1) throw Error(ErrorKind::Validation, "n must be >= 1");
    const double root_n = std::sqrt(static_cast<double>(n));
    const auto K = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * t));
    const auto target = static_cast<Site>(std::floor(a * root_n));
    double sum = 0.0;
    LatticeDistribution p = LatticeDistribution::dirac(0);
    for (std::int64_t k = 0; k < K; ++k) {
      sum += p(target);
      p = convolve(p, d);
    }
    rows.push_back({n, sum / root_n, limit});
  }
  return rows;
}

CharFunctionBound char_function_bound(const WeightVector& w, int grid_points) {
  if (grid_points < 2) throw Error(ErrorKind::Validation, "need at least two grid points");
  CharFunctionBound out;
  out.grid_points = grid_points;
  const double pi = std::numbers::pi;
  auto gap = [&](double th) { return 1.0 - std::abs(centered_char_function(w.distribution(), th)); };

  // node j at -pi + 2 pi j / (N - 1); theta = 0 excluded
  std::vector<double> grid;
  for (int j = 0; j < grid_points; ++j) {
    const double th = -pi + 2.0 * pi * j / (grid_points - 1);
    if (std::abs(th) > 1e-12) grid.push_back(th);
  }
  double b = std::numeric_limits<double>::infinity();
  for (double th : grid) b = std::min(b, gap(th) / (th * th));
  out.b = b;
  out.holds_on_grid = b > 0.0;
  // the minimiser meets the bound with equality up to rounding
  for (double th : grid) out.holds_on_grid = out.holds_on_grid && gap(th) >= b * th * th * (1.0 - 1e-12);

  out.holds_off_grid = b > 0.0;
  const double shift = pi / (grid_points - 1);
  for (double th : grid) {
    const double s = th + shift;
    if (s > pi || std::abs(s) < 1e-12) continue;
    out.holds_off_grid = out.holds_off_grid && gap(s) >= 0.99 * b * s * s;
  }
  return out;
}

std::vector<ErfcSandwichRow> erfc_sandwich(const std::vector<double>& r_grid) {
  std::vector<ErfcSandwichRow> rows;
  for (double r : r_grid) {
    if (r < 0.0) throw Error(ErrorKind::Validation, "erfc sandwich needs r >= 0");
    // e^{r^2} int_r^inf e^{-s^2} ds = int_0^inf e^{-2ru - u^2} du; the tail past u = 40 is below e^{-1600}
    auto f = [r](double u) { return std::exp(-2.0 * r * u - u * u); };
    const auto res = quad::integrate(f, 0.0, 40.0, {1e-14, 0.0, 4000}, 16);
    if (!res.converged) throw Error(ErrorKind::QuadratureFailure, "erfc sandwich integral");
    ErfcSandwichRow row;
    row.r = r;
    row.value = res.value;
    row.lower = 1.0 / (r + std::sqrt(r * r + 2.0));
    row.upper = 1.0 / (r + std::sqrt(r * r + 4.0 / std::numbers::pi));
    row.pass = row.lower < row.value && row.value <= row.upper * (1.0 + 1e-12);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace harness
