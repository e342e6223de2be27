#include "harness/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "harness/error.hpp"
#include "harness/quadrature.hpp"

namespace harness {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

void check_point(const SpaceTimePoint& p) {
  if (!(p.t >= 0.0)) throw Error(ErrorKind::Validation, "space-time point needs t >= 0");
}

double upper_tail(double nu_sq, double y) {
  if (nu_sq == 0.0) return y < 0.0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(y / std::sqrt(2.0 * nu_sq));
}

}  // namespace

void LimitSpec::validate() const {
  if (!(sigma1_sq > 0.0)) throw Error(ErrorKind::Validation, "sigma1_sq must be > 0");
  if (!(sigma_xi_sq >= 0.0)) throw Error(ErrorKind::Validation, "sigma_xi_sq must be >= 0");
  if (!(varsigma_sq >= 0.0)) throw Error(ErrorKind::Validation, "varsigma_sq must be >= 0");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double psi(double nu_sq, double x) {
  if (nu_sq < 0.0) throw Error(ErrorKind::Validation, "psi needs nu^2 >= 0");
  if (nu_sq == 0.0) return std::max(-x, 0.0);
  const double nu = std::sqrt(nu_sq);
  const double z = x / nu;
  return nu * kInvSqrt2Pi * std::exp(-0.5 * z * z) - x * 0.5 * std::erfc(z / std::numbers::sqrt2);
}

double gamma1(const SpaceTimePoint& p1, const SpaceTimePoint& p2, double sigma1_sq) {
  check_point(p1);
  check_point(p2);
  const double d = p2.r - p1.r;
  return psi(sigma1_sq * (p2.t + p1.t), d) - psi(sigma1_sq * std::abs(p2.t - p1.t), d);
}

double gamma2(const SpaceTimePoint& p1, const SpaceTimePoint& p2, double sigma1_sq) {
  check_point(p1);
  check_point(p2);
  return psi(sigma1_sq * p1.t, -p1.r) + psi(sigma1_sq * p2.t, p2.r) -
         psi(sigma1_sq * (p1.t + p2.t), p2.r - p1.r);
}

double gamma1_integral(const SpaceTimePoint& p1, const SpaceTimePoint& p2, double sigma1_sq) {
  check_point(p1);
  check_point(p2);
  const double lo = std::sqrt(sigma1_sq * std::abs(p2.t - p1.t));
  const double hi = std::sqrt(sigma1_sq * (p2.t + p1.t));
  if (hi <= lo) return 0.0;
  const double d2 = (p2.r - p1.r) * (p2.r - p1.r);
  // v = u^2 removes the v^{-1/2} endpoint singularity
  auto f = [d2](double u) { return u == 0.0 ? 0.0 : std::exp(-0.5 * d2 / (u * u)); };
  if (d2 == 0.0) return kInvSqrt2Pi * (hi - lo);
  const auto res = quad::integrate(f, lo, hi, {1e-13, 0.0, 4000}, 4);
  if (!res.converged) throw Error(ErrorKind::QuadratureFailure, "gamma1 integral form");
  return kInvSqrt2Pi * res.value;
}

double gamma2_integral(const SpaceTimePoint& p1, const SpaceTimePoint& p2, double sigma1_sq) {
  check_point(p1);
  check_point(p2);
  const double vs = sigma1_sq * p1.t;
  const double vt = sigma1_sq * p2.t;
  auto left = [&](double x) { return upper_tail(vs, p1.r - x) * upper_tail(vt, p2.r - x); };
  auto right = [&](double x) { return (1.0 - upper_tail(vs, p1.r - x)) * (1.0 - upper_tail(vt, p2.r - x)); };

  // Beyond `reach` every factor that must vanish is a Gaussian tail past 12
  // standard deviations, whose integral is below 1e-30 by the erfc bound.
  const double sd = std::sqrt(std::max(vs, vt));
  const double reach = std::max(std::abs(p1.r), std::abs(p2.r)) + 12.0 * sd + 1.0;

  // the integrands may jump at x = q and x = r when a time is 0
  std::vector<double> cuts{-reach, 0.0, reach};
  for (double c : {p1.r, p2.r})
    if (c > -reach && c < reach && c != 0.0) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    if (b <= a) continue;
    const auto res = b <= 0.0 ? quad::integrate(left, a, b, {1e-13, 0.0, 4000}, 8)
                              : quad::integrate(right, a, b, {1e-13, 0.0, 4000}, 8);
    if (!res.converged) throw Error(ErrorKind::QuadratureFailure, "gamma2 integral form");
    total += res.value;
  }
  return total;
}

double z_covariance(const LimitSpec& spec, const SpaceTimePoint& p1, const SpaceTimePoint& p2) {
  spec.validate();
  double v = 0.0;
  if (spec.sigma_xi_sq != 0.0) v += spec.sigma_xi_sq / spec.sigma1_sq * gamma1(p1, p2, spec.sigma1_sq);
  if (spec.varsigma_sq != 0.0) v += spec.varsigma_sq * gamma2(p1, p2, spec.sigma1_sq);
  return v;
}

double fbm_covariance(const LimitSpec& spec, double s, double t) {
  spec.validate();
  if (s < 0.0 || t < 0.0) throw Error(ErrorKind::Validation, "fbm covariance needs s, t >= 0");
  const double expected = spec.sigma_xi_sq / spec.sigma1_sq;
  if (std::abs(spec.varsigma_sq - expected) > 1e-12 * std::max(1.0, expected)) {
    throw Error(ErrorKind::SpecMismatch, "fBM marginal needs varsigma^2 = sigma_xi^2 / sigma1^2");
  }
  return spec.sigma_xi_sq / std::sqrt(2.0 * std::numbers::pi * spec.sigma1_sq) *
         (std::sqrt(s) + std::sqrt(t) - std::sqrt(std::abs(t - s)));
}

void write_covariance_grid(std::ostream& os, const LimitSpec& spec, const std::vector<SpaceTimePoint>& points) {
  os << "t1,r1,t2,r2,gamma1,gamma2,z_cov\n";
  os.precision(17);
  for (const auto& p : points) {
    for (const auto& q : points) {
      os << p.t << ',' << p.r << ',' << q.t << ',' << q.r << ',' << gamma1(p, q, spec.sigma1_sq) << ','
         << gamma2(p, q, spec.sigma1_sq) << ',' << z_covariance(spec, p, q) << '\n';
    }
  }
}

}  // namespace harness
