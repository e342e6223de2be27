#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "harness/lclt.hpp"
#include "support.hpp"

using namespace harness;
using harness::testing::thrown_kind;

namespace {

WeightVector lazy() { return validate_weights({{0, 0.5}, {1, 0.5}}); }
WeightVector symmetric() { return validate_weights({{-1, 0.25}, {0, 0.5}, {1, 0.25}}); }
WeightVector asymmetric() { return validate_weights({{-1, 0.5}, {0, 0.25}, {2, 0.25}}); }

std::vector<std::int64_t> dyadic(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> g;
  for (std::int64_t t = lo; t <= hi; t *= 2) g.push_back(t);
  return g;
}

}  // namespace

TEST_CASE("Gaussian approximant") {
  const WeightVector w = lazy();
  CHECK(gaussian_transition(w, 4, 2) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
  CHECK(gaussian_transition(w, 4, 1) == doctest::Approx(gaussian_transition(w, 4, 3)).epsilon(1e-14));
  for (std::int64_t t : {16, 64, 1024}) {
    for (const WeightVector& v : {lazy(), asymmetric()}) {
      double mass = 0.0;
      for (Site x = -4 * t; x <= 4 * t; ++x) mass += gaussian_transition(v, t, x);
      CHECK(mass >= 0.999);
      CHECK(mass <= 1.001);
    }
  }
}

TEST_CASE("lazy walk at t = 4 against the exact binomial") {
  const double binom[] = {1, 4, 6, 4, 1};
  double worst = 0.0;
  for (Site x = -40; x <= 44; ++x) {
    const double p = (x >= 0 && x <= 4) ? binom[x] / 16.0 : 0.0;
    const double g = std::exp(-(x - 2.0) * (x - 2.0) / 2.0) / std::sqrt(2.0 * std::numbers::pi);
    worst = std::max(worst, std::abs(p - g));
  }
  const auto prof = lclt_error_profile(lazy(), {4});
  CHECK(prof.sup_errors[0] == doctest::Approx(worst).epsilon(1e-12));
}

TEST_CASE("sup error decays like 1/t and its gradient like t^{-3/2}") {
  for (const WeightVector& w : {lazy(), symmetric(), asymmetric()}) {
    const auto prof = lclt_error_profile(w, dyadic(16, 4096));
    const double first = prof.scaled.front();
    for (double s : prof.scaled) CHECK(s <= 1.5 * first);
    for (std::size_t k = 1; k < prof.sup_errors.size(); ++k) CHECK(prof.sup_errors[k] < prof.sup_errors[k - 1]);
    CHECK(prof.grad_slope <= prof.fitted_slope - 0.3);
    for (double s : prof.grad_scaled) CHECK(std::isfinite(s));
  }
  const auto asym = lclt_error_profile(asymmetric(), dyadic(16, 4096));
  CHECK(asym.fitted_slope <= -0.8);
  std::ostringstream os;
  asym.write_csv(os);
  CHECK(os.str().rfind("t,sup_err,t_sup_err,grad_err,t15_grad_err\n", 0) == 0);
  CHECK(thrown_kind([] { lclt_error_profile(lazy(), {10000}); }) == ErrorKind::BudgetExceeded);
}

TEST_CASE("Green-sum limit") {
  CHECK(green_sum_limit(0.5, 1.0, 0.0) == doctest::Approx(std::sqrt(4.0 / std::numbers::pi)).epsilon(1e-10));
  CHECK(green_sum_limit(1.0, 1.0, 10.0) < 1e-8);
  // closed form at a = 0: (1/sigma^2) sqrt(2 sigma^2 t / pi)
  CHECK(green_sum_limit(0.5, 2.0, 0.0) == doctest::Approx(2.0 * std::sqrt(2.0 * 0.5 * 2.0 / std::numbers::pi)).epsilon(1e-10));

  const auto d = validate_weights({{-1, 0.25}, {0, 0.5}, {1, 0.25}}).distribution();
  const auto rows = green_sum_convergence(d, 1.0, 0.0, {256, 1024, 4096});
  CHECK(std::abs(rows.back().finite_sum - rows.back().limit) <= 0.03);
  CHECK(std::abs(rows.back().finite_sum - rows.back().limit) <= std::abs(rows.front().finite_sum - rows.front().limit));

  CHECK(thrown_kind([] { green_sum_convergence(lazy().distribution(), 1.0, 0.0, {64}); }) == ErrorKind::MeanNotZero);
  LatticeDistribution two;
  two.offset = -1;
  two.masses = Eigen::Vector3d(0.5, 0.0, 0.5);
  CHECK(thrown_kind([&] { green_sum_convergence(two, 1.0, 0.0, {64}); }) == ErrorKind::SpanNotOne);
}

TEST_CASE("characteristic-function bound") {
  for (const WeightVector& w : {lazy(), symmetric(), asymmetric()}) {
    const auto b = char_function_bound(w, 10000);
    CHECK(b.b > 0.0);
    CHECK(b.holds_on_grid);
    CHECK(b.holds_off_grid);
  }
}

TEST_CASE("erfc sandwich") {
  std::vector<double> grid;
  for (int k = 0; k <= 16; ++k) grid.push_back(0.5 * k);
  const auto rows = erfc_sandwich(grid);
  for (const auto& row : rows) {
    CHECK(row.pass);
    CHECK(row.lower <= row.value);
    if (row.r <= 5.0) {
      const double oracle = std::sqrt(std::numbers::pi) / 2.0 * std::erfc(row.r) * std::exp(row.r * row.r);
      CHECK(row.value == doctest::Approx(oracle).epsilon(1e-10));
    }
  }
  CHECK(rows.front().value == doctest::Approx(std::sqrt(std::numbers::pi) / 2.0).epsilon(1e-12));
}
