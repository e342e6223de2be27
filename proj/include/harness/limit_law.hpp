#pragma once

#include <iosfwd>
#include <vector>

namespace harness {

/// Parameters of the limiting Gaussian field Z.
struct LimitSpec {
  double sigma1_sq = 1.0;
  double sigma_xi_sq = 1.0;
  /// series of covariances of the initial increments
  double varsigma_sq = 0.0;
  double mu0 = 0.0;

  void validate() const;
};

/// Macroscopic (time, space) point.
struct SpaceTimePoint {
  double t = 0.0;
  double r = 0.0;
};

/// Psi_{nu^2}(x) = nu^2 phi_{nu^2}(x) - x (1 - Phi_{nu^2}(x)) = E[(B - x)^+], B ~ N(0, nu^2).
/// At nu^2 = 0 this is max(-x, 0).
double psi(double nu_sq, double x);

/// Standard normal cdf via erfc.
double normal_cdf(double z);

/// Gamma_1((s,q),(t,r)) = Psi_{sigma1^2 (t+s)}(r-q) - Psi_{sigma1^2 |t-s|}(r-q)
double gamma1(const SpaceTimePoint& p1, const SpaceTimePoint& p2, double sigma1_sq);
/// Gamma_2((s,q),(t,r)) = Psi_{sigma1^2 s}(-q) + Psi_{sigma1^2 t}(r) - Psi_{sigma1^2 (t+s)}(r-q)
double gamma2(const SpaceTimePoint& p1, const SpaceTimePoint& p2, double sigma1_sq);

/// (1/2) int_{sigma1^2|t-s|}^{sigma1^2(t+s)} (2 pi v)^{-1/2} exp(-(r-q)^2 / 2v) dv by quadrature.
double gamma1_integral(const SpaceTimePoint& p1, const SpaceTimePoint& p2, double sigma1_sq);
/// int_{-inf}^0 P(B_s > q-x) P(B_t > r-x) dx + int_0^inf P(B_s <= q-x) P(B_t <= r-x) dx
/// for Brownian motion with variance sigma1^2 per unit time, by quadrature.
double gamma2_integral(const SpaceTimePoint& p1, const SpaceTimePoint& p2, double sigma1_sq);

/// (sigma_xi^2 / sigma1^2) Gamma_1 + varsigma^2 Gamma_2
double z_covariance(const LimitSpec& spec, const SpaceTimePoint& p1, const SpaceTimePoint& p2);

/// sigma_xi^2 / sqrt(2 pi sigma1^2) (sqrt s + sqrt t - sqrt|t-s|). Throws
/// SpecMismatch unless varsigma^2 = sigma_xi^2 / sigma1^2.
double fbm_covariance(const LimitSpec& spec, double s, double t);

/// CSV rows "t1,r1,t2,r2,gamma1,gamma2,z_cov" over all ordered pairs.
void write_covariance_grid(std::ostream& os, const LimitSpec& spec, const std::vector<SpaceTimePoint>& points);

}  // namespace harness
