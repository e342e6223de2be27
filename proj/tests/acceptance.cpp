// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "harness/fluctuation.hpp"
#include "harness/harness_sim.hpp"
#include "harness/lclt.hpp"
#include "harness/limit_law.hpp"
#include "harness/potential.hpp"
#include "harness/stats.hpp"
#include "support.hpp"

using namespace harness;
using harness::testing::random_weights;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

WeightVector lazy() { return validate_weights({{0, 0.5}, {1, 0.5}}); }
WeightVector symmetric() { return validate_weights({{-1, 0.25}, {0, 0.5}, {1, 0.25}}); }
WeightVector asymmetric() { return validate_weights({{-1, 0.5}, {0, 0.25}, {2, 0.25}}); }

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

Outcome dual_identity() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> steps(0, 64);
  std::uniform_int_distribution<Site> site(-10, 10);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const WeightVector w = random_weights(rng);
    const int T = steps(rng);
    const Site y = site(rng);
    const std::uint64_t seed = rng();
    const auto h0 = iid_field(NoiseFamily::gaussian, 1.0)(y - 64 * w.reach() - 1, y + 64 * w.reach() + 1, seed);
    const NoiseRealization xi(derive_seed(seed, 1), NoiseSpec{});
    const double direct = evolve(h0, w, xi, T)(y);
    const double dual = dual_representation(h0, w, xi, T, y);
    worst = std::max(worst, std::abs(direct - dual) / std::max({std::abs(direct), std::abs(dual), 1e-12}));
  }
  return {worst < 1e-9, "max relative gap " + fmt(worst)};
}

Outcome q_structure() {
  std::mt19937_64 rng(202);
  bool ok = true;
  double worst_mean = 0.0, worst_var = 0.0;
  for (int k = 0; k < 20; ++k) {
    const WeightVector w = random_weights(rng, -4, 4, 6);
    const WeightVector q = q_kernel(w);
    for (Site x = 0; x <= q.reach(); ++x) ok = ok && q(x) == q(-x);
    ok = ok && q.span() == 1;
    worst_mean = std::max(worst_mean, std::abs(q.mean()));
    worst_var = std::max(worst_var, std::abs(q.variance() - 2.0 * w.variance()));
  }
  ok = ok && worst_mean <= 1e-12 && worst_var <= 1e-12;
  return {ok, "mean gap " + fmt(worst_mean) + ", variance gap " + fmt(worst_var)};
}

Outcome potential_identities() {
  bool ok = true;
  double harm = 0.0, dsum = 0.0, agree = 0.0, lazy_gap = 0.0;
  for (const WeightVector& w : {lazy(), symmetric(), asymmetric()}) {
    const WeightVector q = q_kernel(w);
    const auto f = potential_kernel(w, 30 + q.reach());
    harm = std::max(harm, f.harmonicity_residual(q));
    const auto wide = potential_kernel(w, 400);
    double s = 0.0;
    for (Site x = -399; x <= 399; ++x) s += wide.second_difference(x);
    dsum = std::max(dsum, std::abs(s - 1.0 / w.variance()));
    const auto ser = potential_kernel(w, 16, PotentialMethod::series);
    for (Site x = 0; x <= 16; ++x) {
      const double gap = std::abs(f.a(x) - ser.a(x));
      ok = ok && gap <= std::max(1e-6, ser.tail_bound(x));
      agree = std::max(agree, gap / std::max(1e-6, ser.tail_bound(x)));
    }
  }
  const auto l = potential_kernel(lazy(), 30);
  for (Site x = -30; x <= 30; ++x) lazy_gap = std::max(lazy_gap, std::abs(l.a(x) - 2.0 * std::abs(x)));
  ok = ok && harm <= 1e-8 && dsum <= 1e-6 && lazy_gap <= 1e-9;
  return {ok, "harmonicity " + fmt(harm) + ", sum D gap " + fmt(dsum) + ", method gap/bound " + fmt(agree) +
                  ", lazy gap " + fmt(lazy_gap)};
}

Outcome invariant_covariance() {
  bool ok = true;
  double sum_gap = 0.0, inv_gap = 0.0;
  const double sx = 1.3;
  for (const WeightVector& w : {lazy(), symmetric(), asymmetric()}) {
    const auto t = potential_kernel(w, 128);
    const auto bound = fit_exponential_bound(t, sx, 24);
    double s = 0.0;
    for (Site x = -127; x <= 127; ++x) s += cov0(t, sx, x);
    // the neglected tail is at most twice the geometric sum of the fitted bound
    const double tail = 2.0 * bound.A * std::exp(-bound.c * 128.0) / (1.0 - std::exp(-bound.c));
    sum_gap = std::max(sum_gap, std::abs(s - sx / w.variance()) + tail);
    const int N = 4096;
    for (Site k = -8; k <= 8; ++k) {
      double v = 0.0;
      for (int j = 0; j < N; ++j) {
        const double th = -std::numbers::pi + 2.0 * std::numbers::pi * j / N;
        v += spectral_density(w, sx, th) * std::cos(k * th);
      }
      inv_gap = std::max(inv_gap, std::abs(v * 2.0 * std::numbers::pi / N - cov0(t, sx, k)));
    }
    for (Site x = 25; x <= 126; ++x) ok = ok && bound.holds(x, cov0(t, sx, x));
  }
  ok = ok && sum_gap <= 1e-6 && inv_gap <= 1e-6;
  return {ok, "sum gap " + fmt(sum_gap) + ", inversion gap " + fmt(inv_gap) + ", held-out lags 25..126"};
}

Outcome pi0_sampler() {
  const WeightVector w = asymmetric();
  const NoiseSpec noise{};
  const Pi0Sampler sampler(w, noise, -6, 6);
  const auto table = potential_kernel(w, 8);
  const std::size_t R = 100000;
  std::vector<double> a0(R), a1(R), b0(R), b1(R);
  for (std::size_t r = 0; r < R; ++r) {
    const auto eta = sampler.sample(derive_seed(505, r)).field;
    a0[r] = eta(0);
    a1[r] = eta(1);
    const auto next = increment_evolve(eta, w, NoiseRealization(derive_seed(506, r), noise), 1);
    b0[r] = next(0);
    b1[r] = next(1);
  }
  bool ok = true;
  std::string detail;
  auto check = [&](const char* what, stats::Estimate e, double target) {
    const double z = std::abs(e.value - target) / e.std_error;
    ok = ok && z <= 3.0;
    detail += std::string(detail.empty() ? "" : ", ") + what + " " + fmt(z) + " SE";
  };
  check("var", stats::variance_estimate(a0), cov0(table, 1.0, 0));
  check("lag1", stats::covariance_estimate(a0, a1), cov0(table, 1.0, 1));
  check("stepped var", stats::variance_estimate(b0), cov0(table, 1.0, 0));
  check("stepped lag1", stats::covariance_estimate(b0, b1), cov0(table, 1.0, 1));
  return {ok, detail};
}

Outcome decomposition() {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> ns(4, 128);
  std::uniform_real_distribution<double> ts(0.0, 2.0), rs(-1.0, 1.0), mus(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const WeightVector w = random_weights(rng);
    const std::int64_t n = ns(rng);
    const SpaceTimePoint p{ts(rng), rs(rng)};
    ScenarioParams params;
    params.mean = mus(rng);
    params.variance = 1.0;
    Scenario s;
    if (k % 3 == 0) {
      params.family = NoiseFamily::centered_two_point;
      s = scenario_init("iid", params);
    } else if (k % 3 == 1) {
      params.coefficients = std::vector<double>{1.0, -0.5, 0.3};
      s = scenario_init("m_dependent", params);
    } else {
      params.weights = w;
      params.noise = NoiseSpec{};
      s = scenario_init("pi0", params);
    }
    const auto [lo, hi] = increment_window(w, n, {p});
    const auto eta0 = s.generator(lo, hi)(lo, hi, rng());
    const auto d = decompose_fluctuation(w, eta0, NoiseRealization(rng(), NoiseSpec{}), n, p, s.mu0);
    worst = std::max(worst, d.residual(s.mu0));
  }
  return {worst < 1e-7, "max relative residual " + fmt(worst)};
}

Outcome limit_covariance() {
  const WeightVector w = lazy();
  const NoiseSpec noise{};
  std::vector<SpaceTimePoint> grid;
  for (double t : {0.5, 1.0, 1.5})
    for (double r : {-0.5, 0.0, 0.5}) grid.push_back({t, r});

  ScenarioParams iid;
  iid.variance = 1.0;
  iid.family = NoiseFamily::centered_uniform;
  ScenarioParams pi0;
  pi0.weights = w;
  pi0.noise = noise;
  ScenarioParams mdep;
  mdep.coefficients = std::vector<double>{1.0, 0.25};
  mdep.variance = 1.0;

  bool ok = true;
  std::string detail;
  const std::pair<const char*, ScenarioParams> cases[] = {{"iid", iid}, {"pi0", pi0}, {"m_dependent", mdep}};
  std::uint64_t seed = 700;
  for (const auto& [kind, params] : cases) {
    const auto rows =
        limit_covariance_report(w, scenario_init(kind, params), noise, 256, grid, 20000, ++seed, workers());
    int passed = 0;
    double worst = 0.0;
    for (const auto& r : rows) {
      passed += r.pass;
      worst = std::max(worst, std::abs(r.mc - r.z) / r.band);
    }
    ok = ok && passed == static_cast<int>(rows.size());
    detail += std::string(detail.empty() ? "" : "; ") + kind + " " + std::to_string(passed) + "/" +
              std::to_string(rows.size()) + " (worst gap/band " + fmt(worst) + ")";
  }
  return {ok, detail};
}

Outcome scaling() {
  const WeightVector w = lazy();
  ScenarioParams params;
  params.weights = w;
  params.noise = NoiseSpec{};
  const auto res = scaling_exponents(w, scenario_init("pi0", params), NoiseSpec{}, {64, 128, 256, 512},
                                     {0.25, 0.5, 1.0, 2.0, 4.0}, 256, 20000, 5, workers());
  const bool ok = res.space_slope >= 0.4 && res.space_slope <= 0.6 && res.hurst >= 0.2 && res.hurst <= 0.3;
  return {ok, "space slope " + fmt(res.space_slope) + ", Hurst " + fmt(res.hurst)};
}

Outcome gamma_identities() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> ts(0.0, 3.0), rs(-2.0, 2.0), ss(0.2, 2.0);
  double g1 = 0.0, g2 = 0.0, fb = 0.0;
  for (int k = 0; k < 100; ++k) {
    const SpaceTimePoint a{ts(rng), rs(rng)}, b{ts(rng), rs(rng)};
    const double s1 = ss(rng);
    g1 = std::max(g1, std::abs(gamma1(a, b, s1) - gamma1_integral(a, b, s1)));
    g2 = std::max(g2, std::abs(gamma2(a, b, s1) - gamma2_integral(a, b, s1)));
  }
  for (double s1 : {0.25, 1.0, 2.5}) {
    const LimitSpec spec{s1, 1.7, 1.7 / s1, 0.0};
    for (double s : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0})
      for (double t : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0})
        fb = std::max(fb, std::abs(fbm_covariance(spec, s, t) - z_covariance(spec, {s, 0.0}, {t, 0.0})));
  }
  return {g1 <= 1e-8 && g2 <= 1e-8 && fb <= 1e-10,
          "Gamma1 gap " + fmt(g1) + ", Gamma2 gap " + fmt(g2) + ", fBM gap " + fmt(fb)};
}

Outcome lclt() {
  std::vector<std::int64_t> grid;
  for (std::int64_t t = 16; t <= 4096; t *= 2) grid.push_back(t);
  bool ok = true;
  std::string detail;
  const std::pair<const char*, WeightVector> laws[] = {
      {"lazy", lazy()}, {"symmetric", symmetric()}, {"asymmetric", asymmetric()}};
  for (const auto& [name, w] : laws) {
    const auto p = lclt_error_profile(w, grid);
    double ratio = 0.0;
    for (double s : p.scaled) ratio = std::max(ratio, s / p.scaled.front());
    ok = ok && ratio <= 1.5 && p.grad_slope <= p.fitted_slope - 0.3;
    if (std::string(name) == "asymmetric") ok = ok && p.fitted_slope <= -0.8;
    detail += std::string(name) + " slope " + fmt(p.fitted_slope) + "/" + fmt(p.grad_slope) + " ratio " +
              fmt(ratio) + "; ";
  }
  const auto rows = green_sum_convergence(symmetric().distribution(), 1.0, 0.0, {256, 1024, 4096});
  const double gap = std::abs(rows.back().finite_sum - rows.back().limit);
  const double exact = std::abs(rows.back().limit - std::sqrt(4.0 / std::numbers::pi));
  ok = ok && gap <= 0.03 && exact <= 1e-10;
  detail += "green sum gap " + fmt(gap) + ", limit vs sqrt(4/pi) " + fmt(exact);
  return {ok, detail};
}

Outcome hydro() {
  bool ok = true;
  double worst = 0.0;
  const NoiseSpec quiet{NoiseFamily::gaussian, 0.0};
  for (const WeightVector& w : {lazy(), asymmetric()})
    for (std::int64_t n : {16, 64, 256, 1024}) {
      const double e = hydrodynamic_profile_error([](double x) { return 0.7 * x - 0.2; }, w, quiet, n, 1.0, 1.0, 1);
      ok = ok && e <= 2.0 / static_cast<double>(n);
      worst = std::max(worst, e * static_cast<double>(n));
    }
  int ordered = 0;
  const auto u = [](double x) { return std::sin(x); };
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double coarse = hydrodynamic_profile_error(u, asymmetric(), NoiseSpec{}, 32, 1.0, 1.0, seed);
    const double fine = hydrodynamic_profile_error(u, asymmetric(), NoiseSpec{}, 256, 1.0, 1.0, seed);
    ordered += fine < coarse;
  }
  ok = ok && ordered == 5;
  return {ok, "max n*err (linear) " + fmt(worst) + ", sin ordered on " + std::to_string(ordered) + "/5 seeds"};
}

Outcome coupling() {
  const WeightVector w = lazy();
  const Pi0Sampler sampler(w, NoiseSpec{}, -1024, 1024);
  FieldGenerator pi0 = [&sampler](Site lo, Site hi, std::uint64_t seed) {
    return sampler.sample(seed).field.crop(lo, hi);
  };
  const auto pts = coupling_decay(iid_field(NoiseFamily::centered_uniform, 1.0), pi0, w, NoiseSpec{}, {16, 1024},
                                  1000, 1212, workers());
  const double ratio = pts[1].mean_abs_diff / pts[0].mean_abs_diff;
  return {ratio < 0.5, "E|diff| " + fmt(pts[0].mean_abs_diff) + " -> " + fmt(pts[1].mean_abs_diff) + ", ratio " +
                           fmt(ratio)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"dual representation", 30, dual_identity},
      {"q-kernel structure", 1, q_structure},
      {"potential kernel identities", 60, potential_identities},
      {"invariant covariance", 30, invariant_covariance},
      {"pi0 sampler", 120, pi0_sampler},
      {"decomposition identity", 120, decomposition},
      {"limit covariance", 1200, limit_covariance},
      {"scaling exponents", 1200, scaling},
      {"Gamma identities", 5, gamma_identities},
      {"LCLT", 300, lclt},
      {"hydrodynamic limit", 120, hydro},
      {"coupling decay", 300, coupling},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s %2d %s: %s [%.1f s of %.0f s]\n", pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(), secs,
                c.budget_seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
