#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "harness/fluctuation.hpp"
#include "harness/stats.hpp"
#include "support.hpp"

using namespace harness;
using harness::testing::random_weights;
using harness::testing::thrown_kind;

namespace {

WeightVector lazy() { return validate_weights({{0, 0.5}, {1, 0.5}}); }
WeightVector asymmetric() { return validate_weights({{-1, 0.5}, {0, 0.25}, {2, 0.25}}); }

ScenarioParams iid_params(double var, NoiseFamily f = NoiseFamily::gaussian, double mean = 0.0) {
  ScenarioParams p;
  p.variance = var;
  p.family = f;
  p.mean = mean;
  return p;
}

// Var(sum_{0<i<=L} eta_0(i)) / L from replicas of the generator
double cesaro_ratio(const Scenario& s, Site L, std::size_t R, std::uint64_t seed) {
  const auto gen = s.generator(1, L);
  std::vector<double> sums(R);
  for (std::size_t r = 0; r < R; ++r) sums[r] = gen(1, L, derive_seed(seed, r)).values.sum();
  return stats::variance_estimate(sums).value / static_cast<double>(L);
}

}  // namespace

TEST_CASE("scenario parameters") {
  const Scenario u = scenario_init("iid", iid_params(1.0, NoiseFamily::centered_uniform));
  CHECK(u.mu0 == 0.0);
  CHECK(u.sigma0_sq == 1.0);
  CHECK(u.varsigma_sq == 1.0);

  ScenarioParams pp;
  pp.weights = lazy();
  pp.noise = NoiseSpec{};
  const Scenario p = scenario_init("pi0", pp);
  CHECK(p.varsigma_sq == doctest::Approx(4.0));
  CHECK(p.sigma0_sq == doctest::Approx(4.0).epsilon(1e-9));

  ScenarioParams mp;
  mp.coefficients = std::vector<double>{1.0, 1.0};
  mp.variance = 1.0;
  const Scenario m = scenario_init("m-dependent", mp);
  CHECK(m.sigma0_sq == 2.0);
  CHECK(m.varsigma_sq == 4.0);

  CHECK(thrown_kind([] { scenario_init("levy", ScenarioParams{}); }) == ErrorKind::UnknownKind);
  CHECK(thrown_kind([] { scenario_init("iid", ScenarioParams{}); }) == ErrorKind::IncompleteParams);
  CHECK(thrown_kind([] { scenario_init("pi0", ScenarioParams{}); }) == ErrorKind::IncompleteParams);
  ScenarioParams no_var;
  no_var.coefficients = std::vector<double>{1.0};
  CHECK(thrown_kind([&] { scenario_init("m_dependent", no_var); }) == ErrorKind::IncompleteParams);
}

TEST_CASE("varsigma^2 matches the long-window variance") {
  const Site L = 10000;
  const Scenario u = scenario_init("iid", iid_params(1.0, NoiseFamily::centered_uniform));
  CHECK(cesaro_ratio(u, L, 8000, 1) == doctest::Approx(u.varsigma_sq).epsilon(0.05));

  ScenarioParams mp;
  mp.coefficients = std::vector<double>{1.0, -0.4, 0.7};
  mp.variance = 0.8;
  const Scenario m = scenario_init("m_dependent", mp);
  CHECK(cesaro_ratio(m, L, 8000, 2) == doctest::Approx(m.varsigma_sq).epsilon(0.05));

  // pi0: the covariance series is summable; sum it directly from cov0
  for (const WeightVector& w : {lazy(), asymmetric()}) {
    ScenarioParams pp;
    pp.weights = w;
    pp.noise = NoiseSpec{NoiseFamily::gaussian, 1.3};
    const Scenario p = scenario_init("pi0", pp);
    const auto table = potential_kernel(w, 400);
    double cesaro = 0.0;
    for (Site x = -399; x <= 399; ++x) cesaro += (1.0 - std::abs(x) / 400.0) * cov0(table, 1.3, x);
    // the D-series sums to 1/sigma1^2; the Cesaro weights on x != 0 only shrink a tail of order 1/L
    CHECK(cesaro == doctest::Approx(p.varsigma_sq).epsilon(0.01));
  }
}

TEST_CASE("the origin point is identically zero") {
  const Scenario s = scenario_init("iid", iid_params(1.0));
  const auto out = fluctuation_samples(lazy(), s, NoiseSpec{}, 64, {{0.0, 0.0}}, 10, 1);
  for (const auto& f : out) CHECK(f.values[0] == 0.0);
}

TEST_CASE("samples are deterministic and independent of the worker count") {
  const Scenario s = scenario_init("iid", iid_params(1.0, NoiseFamily::centered_uniform));
  const std::vector<SpaceTimePoint> pts{{0.5, -0.5}, {1.0, 0.0}, {1.5, 0.5}};
  const auto a = fluctuation_samples(asymmetric(), s, NoiseSpec{}, 64, pts, 30, 9, 1);
  const auto b = fluctuation_samples(asymmetric(), s, NoiseSpec{}, 64, pts, 30, 9, 3);
  for (std::size_t r = 0; r < a.size(); ++r) CHECK(a[r].values == b[r].values);
}

TEST_CASE("a noiseless flat start leaves only the deterministic part") {
  const Scenario s = scenario_init("iid", iid_params(0.0, NoiseFamily::gaussian, 0.7));
  const NoiseSpec quiet{NoiseFamily::gaussian, 0.0};
  for (std::int64_t n : {16, 64, 256}) {
    const auto out = fluctuation_samples(asymmetric(), s, quiet, n, {{1.0, 0.3}, {2.0, -0.4}}, 1, 1);
    for (double v : out[0].values) CHECK(std::abs(v) <= 0.7 * 2.0 * std::pow(double(n), -0.25) + 1e-12);
  }
}

TEST_CASE("decomposition examples") {
  const WeightVector w = lazy();
  const std::int64_t n = 64;
  const SpaceTimePoint p{1.0, 0.0};
  const auto [lo, hi] = increment_window(w, n, {p});
  const auto eta0 = iid_field(NoiseFamily::gaussian, 1.0)(lo, hi, 3);

  const auto d = decompose_fluctuation(w, eta0, NoiseRealization(4, NoiseSpec{}), n, p, 0.0);
  CHECK(d.residual(0.0) < 1e-7);
  CHECK(std::abs(d.sbar + d.fbar - d.h) < 1e-7);

  const auto q = decompose_fluctuation(w, eta0, NoiseRealization(4, NoiseSpec{NoiseFamily::gaussian, 0.0}), n, p, 0.0);
  CHECK(q.fbar == 0.0);
  CHECK(q.residual(0.0) < 1e-7);

  CHECK(thrown_kind([&] { decompose_fluctuation(w, eta0.crop(lo + 5, hi), NoiseRealization(4, NoiseSpec{}), n, p, 0.0); }) ==
        ErrorKind::WindowTooSmall);
  CHECK(thrown_kind([&] { decompose_fluctuation(w, eta0, NoiseRealization(4, NoiseSpec{}), 8192, p, 0.0); }) ==
        ErrorKind::BudgetExceeded);
}

TEST_CASE("decomposition on random configurations") {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> ns(4, 128);
  std::uniform_real_distribution<double> ts(0.0, 2.0), rs(-1.0, 1.0), mus(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const WeightVector w = random_weights(rng);
    const std::int64_t n = ns(rng);
    SpaceTimePoint p{ts(rng), rs(rng)};
    // nt an integer for half the draws: then only the two floors contribute to Hbar
    if (rep % 2 == 0) p.t = std::floor(p.t * static_cast<double>(n)) / static_cast<double>(n);
    const double mu0 = mus(rng);
    const auto [lo, hi] = increment_window(w, n, {p});
    const auto eta0 = iid_field(NoiseFamily::centered_two_point, 1.0, mu0)(lo, hi, rep);
    const auto d = decompose_fluctuation(w, eta0, NoiseRealization(rep, NoiseSpec{}), n, p, mu0);
    CHECK(d.residual(mu0) < 1e-7);
    const double c = rep % 2 == 0 ? 2.0 : 2.0 + std::abs(w.speed());
    CHECK(std::abs(d.hbar) <= c * std::pow(double(n), -0.25) + 1e-12);
  }
}

TEST_CASE("sample covariance is symmetric and positive semidefinite") {
  const Scenario s = scenario_init("iid", iid_params(1.0));
  std::vector<SpaceTimePoint> grid;
  for (double t : {0.5, 1.0})
    for (double r : {-0.5, 0.5}) grid.push_back({t, r});
  const auto out = fluctuation_samples(asymmetric(), s, NoiseSpec{}, 64, grid, 400, 2);
  const Eigen::MatrixXd C = sample_covariance(out);
  CHECK((C - C.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  CHECK(es.eigenvalues().minCoeff() >= -1e-6);
}

TEST_CASE("limit covariance report against Z on a small grid") {
  // noiseless dynamics: only the initial-data part Gamma_2 survives
  const Scenario s = scenario_init("iid", iid_params(1.0));
  const NoiseSpec quiet{NoiseFamily::gaussian, 0.0};
  const std::vector<SpaceTimePoint> grid{{0.0, 0.5}, {1.0, 0.0}, {1.0, 0.5}};
  const auto rows = limit_covariance_report(lazy(), s, quiet, 256, grid, 3000, 6);
  CHECK(rows.size() == 6);
  const LimitSpec spec = limit_spec(lazy(), s, quiet);
  for (const auto& row : rows) {
    CHECK(row.z == doctest::Approx(spec.varsigma_sq * gamma2(row.p1, row.p2, spec.sigma1_sq)));
    CHECK(row.pass);
  }
}

TEST_CASE("degenerate scaling: time slope of the Gamma_2 part") {
  const Scenario s = scenario_init("iid", iid_params(1.0));
  const NoiseSpec quiet{NoiseFamily::gaussian, 0.0};
  const std::vector<double> ts{0.25, 0.5, 1.0, 2.0};
  const auto res = scaling_exponents(lazy(), s, quiet, {64, 128}, ts, 256, 3000, 3);
  Eigen::VectorXd tv(4), zv(4);
  for (int k = 0; k < 4; ++k) {
    tv[k] = ts[static_cast<std::size_t>(k)];
    zv[k] = z_covariance(limit_spec(lazy(), s, quiet), {tv[k], 0.0}, {tv[k], 0.0});
  }
  const double analytic = stats::log_log_slope(tv, zv);
  CHECK(res.time_slope == doctest::Approx(analytic).epsilon(0.1).scale(1.0));
}
