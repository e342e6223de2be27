#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "harness/field.hpp"
#include "harness/harness_sim.hpp"
#include "harness/lattice_kernel.hpp"
#include "harness/limit_law.hpp"
#include "harness/noise.hpp"
#include "harness/potential.hpp"

namespace harness {

enum class ScenarioKind { iid, pi0, m_dependent };

std::string_view to_string(ScenarioKind k);
ScenarioKind parse_scenario_kind(std::string_view name);  // throws UnknownKind

/// Inputs to scenario_init; which fields are required depends on the kind.
///  iid:         variance (family defaults to gaussian)
///  pi0:         weights and noise (the dynamics' own noise law)
///  m_dependent: coefficients c_0..c_m and variance of the base variables
/// mean defaults to 0 for every kind.
struct ScenarioParams {
  std::optional<double> mean;
  std::optional<double> variance;
  std::optional<NoiseFamily> family;
  std::optional<std::vector<double>> coefficients;
  std::optional<WeightVector> weights;
  std::optional<NoiseSpec> noise;
  Pi0Options pi0;
};

/// Law of the initial increments eta_0 together with mu_0, sigma_0^2 and
/// varsigma^2 = sum_x Cov(eta_0(0), eta_0(x)).
struct Scenario {
  ScenarioKind kind = ScenarioKind::iid;
  double mu0 = 0.0;
  double sigma0_sq = 0.0;
  double varsigma_sq = 0.0;

  NoiseFamily family = NoiseFamily::gaussian;  // iid values or m-dependent base variables
  double base_variance = 0.0;                  // m-dependent base variance
  std::vector<double> coefficients;            // m-dependent c_0..c_m
  std::optional<WeightVector> weights;         // pi0
  NoiseSpec noise;                             // pi0
  Pi0Options pi0;

  /// Generator of eta_0 on [first, last]. Expensive set-up (the pi0
  /// covariance factor) happens here, once per window.
  FieldGenerator generator(Site first, Site last) const;
};

/// Throws UnknownKind or IncompleteParams.
Scenario scenario_init(std::string_view kind, const ScenarioParams& params);
Scenario scenario_init(ScenarioKind kind, const ScenarioParams& params);

LimitSpec limit_spec(const WeightVector& w, const Scenario& s, const NoiseSpec& noise);

/// Site y(n) = floor(n t b) + floor(r sqrt n) and step count floor(n t).
Site fluctuation_site(const WeightVector& w, std::int64_t n, const SpaceTimePoint& p);
std::int64_t fluctuation_steps(std::int64_t n, const SpaceTimePoint& p);

struct FluctuationSample {
  std::int64_t n = 0;
  std::vector<SpaceTimePoint> points;
  std::vector<double> values;  // H_n at each point
  std::uint64_t seed = 0;      // replica seed
};

struct SimulationBudget {
  /// largest height window (sites) a replica may allocate
  std::int64_t max_window = 1 << 22;
};

/// Direct simulation of H_n(t,r) = n^{-1/4}(h_{floor(nt)}(y(n)) - mu_0 r sqrt n)
/// at every point, one sample per replica. Replica r uses seed
/// derive_seed(seed, r); results do not depend on `workers`.
std::vector<FluctuationSample> fluctuation_samples(const WeightVector& w, const Scenario& scenario,
                                                   const NoiseSpec& noise, std::int64_t n,
                                                   const std::vector<SpaceTimePoint>& points,
                                                   std::size_t replicas, std::uint64_t seed,
                                                   unsigned workers = 1, const SimulationBudget& budget = {});

struct Decomposition {
  double hbar = 0.0;
  double sbar = 0.0;
  double fbar = 0.0;
  /// directly simulated H_n
  double h = 0.0;
  /// |mu0 hbar + sbar + fbar - h| / max(1, |h|)
  double residual(double mu0) const;
};

/// H_n = mu_0 Hbar + Sbar + Fbar with
///   Hbar = n^{-1/4} (E X_T^y - r sqrt n)
///   Sbar = n^{-1/4} sum_i (eta_0(i) - mu_0){1{i>0} P(i <= X_T^y) - 1{i<=0} P(i > X_T^y)}
///   Fbar = n^{-1/4} sum_{k=1..T} sum_x xi_k(x) p^{T-k}(y, x)
/// from exact transition powers, and H_n by direct simulation on the same
/// eta_0 and noise. Throws BudgetExceeded beyond 4096 steps and
/// WindowTooSmall if eta0 misses the walk's range.
Decomposition decompose_fluctuation(const WeightVector& w, const FieldWindow& eta0, const NoiseRealization& noise,
                                    std::int64_t n, const SpaceTimePoint& point, double mu0);

/// Increment window that fluctuation_samples and decompose_fluctuation need.
std::pair<Site, Site> increment_window(const WeightVector& w, std::int64_t n,
                                       const std::vector<SpaceTimePoint>& points);

struct CovarianceRow {
  std::size_t i = 0;
  std::size_t j = 0;
  SpaceTimePoint p1;
  SpaceTimePoint p2;
  double mc = 0.0;
  double mc_stderr = 0.0;
  double z = 0.0;
  double band = 0.0;  // max(3 stderr, 0.1 |z| + 0.02)
  bool pass = false;
};

/// Replica covariance of H_n over all pairs i <= j of the grid against
/// z_covariance; pass when |mc - z| <= max(3 SE, 0.1|z| + 0.02).
std::vector<CovarianceRow> limit_covariance_report(const WeightVector& w, const Scenario& scenario,
                                                   const NoiseSpec& noise, std::int64_t n,
                                                   const std::vector<SpaceTimePoint>& grid, std::size_t replicas,
                                                   std::uint64_t seed, unsigned workers = 1);

/// Covariance of H_n across samples, one row/column per point.
Eigen::MatrixXd sample_covariance(const std::vector<FluctuationSample>& samples);

struct ScalingResult {
  std::vector<std::int64_t> n_list;
  std::vector<double> space_variance;  // Var[n^{1/4} H_n(1,0)] per n
  double space_slope = 0.0;            // log-log slope, target 0.5
  std::vector<double> t_list;
  std::vector<double> time_variance;   // Var[H_n(t,0)] at hurst_n
  double time_slope = 0.0;
  double hurst = 0.0;                  // time_slope / 2, target 0.25
};

ScalingResult scaling_exponents(const WeightVector& w, const Scenario& scenario, const NoiseSpec& noise,
                                const std::vector<std::int64_t>& n_list, const std::vector<double>& t_list,
                                std::int64_t hurst_n, std::size_t replicas, std::uint64_t seed,
                                unsigned workers = 1);

}  // namespace harness
