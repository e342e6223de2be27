#include "harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>

#include "harness/error.hpp"
#include "harness/fluctuation.hpp"
#include "harness/harness_sim.hpp"
#include "harness/lclt.hpp"
#include "harness/parallel.hpp"
#include "harness/limit_law.hpp"
#include "harness/potential.hpp"
#include "harness/quadrature.hpp"
#include "harness/stats.hpp"

#ifndef HARNESS_VERSION
#define HARNESS_VERSION "0.0.0"
#endif
#ifndef HARNESS_BUILD_TAG
#define HARNESS_BUILD_TAG "unknown"
#endif

namespace harness {

std::string_view tool_version() { return HARNESS_VERSION; }
std::string_view build_tag() { return HARNESS_BUILD_TAG; }

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"potential", "covariance", "pi0-sample", "hydro",  "coupling",
                                                 "fluctuation", "scaling",  "lclt",       "green-sum"};
  return names;
}

namespace {

json noise_default() { return {{"family", "gaussian"}, {"variance", 1.0}}; }

json grid_3x3() {
  json pts = json::array();
  for (double t : {0.5, 1.0, 1.5})
    for (double r : {-0.5, 0.0, 0.5}) pts.push_back({t, r});
  return pts;
}

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::Validation, "field '" + field + "': " + why);
}

const json& field(const json& cfg, const std::string& key) {
  if (!cfg.contains(key)) bad_field(key, "missing");
  return cfg.at(key);
}

double number(const json& cfg, const std::string& key) {
  const json& v = field(cfg, key);
  if (!v.is_number()) bad_field(key, "expected a number");
  return v.get<double>();
}

std::int64_t integer(const json& cfg, const std::string& key) {
  const json& v = field(cfg, key);
  if (!v.is_number_integer()) bad_field(key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string text(const json& cfg, const std::string& key) {
  const json& v = field(cfg, key);
  if (!v.is_string()) bad_field(key, "expected a string");
  return v.get<std::string>();
}

template <class T>
std::vector<T> list(const json& cfg, const std::string& key) {
  const json& v = field(cfg, key);
  if (!v.is_array() || v.empty()) bad_field(key, "expected a nonempty array");
  std::vector<T> out;
  for (const auto& e : v) {
    if constexpr (std::is_integral_v<T>) {
      if (!e.is_number_integer()) bad_field(key, "expected integers");
    } else {
      if (!e.is_number()) bad_field(key, "expected numbers");
    }
    out.push_back(e.get<T>());
  }
  return out;
}

WeightVector weights_field(const json& cfg, const std::string& key) {
  try {
    return validate_weights(parse_weight_map(text(cfg, key)));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Validation) throw;
    bad_field(key, e.what());
  }
}

NoiseSpec noise_field(const json& cfg) {
  const json& n = field(cfg, "noise");
  if (!n.is_object()) bad_field("noise", "expected an object");
  NoiseSpec spec;
  try {
    spec.family = parse_noise_family(text(n, "family"));
  } catch (const Error& e) {
    bad_field("noise.family", e.what());
  }
  spec.variance = number(n, "variance");
  if (spec.variance < 0.0) bad_field("noise.variance", "must be >= 0");
  return spec;
}

Pi0Options pi0_options(const json& obj, const std::string& prefix) {
  Pi0Options o;
  const std::string mode = obj.value("pi0_mode", std::string("auto"));
  if (mode == "exact")
    o.mode = Pi0Mode::gaussian_exact;
  else if (mode == "truncated")
    o.mode = Pi0Mode::truncated;
  else if (mode != "auto")
    bad_field(prefix + "pi0_mode", "expected auto, exact or truncated");
  if (obj.contains("truncation_K")) o.truncation_K = integer(obj, "truncation_K");
  if (obj.contains("tolerance") && !obj.at("tolerance").is_null()) o.tolerance = number(obj, "tolerance");
  return o;
}

Scenario scenario_field(const json& cfg, const std::string& key, const WeightVector& w, const NoiseSpec& noise) {
  const json& s = field(cfg, key);
  if (!s.is_object()) bad_field(key, "expected an object");
  static const std::vector<std::string> allowed = {"kind", "mean", "variance", "family", "coefficients",
                                                   "pi0_mode", "truncation_K", "tolerance"};
  for (const auto& [k, v] : s.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw Error(ErrorKind::ConfigParse, "unknown field '" + key + "." + k + "'");
    }
  }
  ScenarioParams p;
  if (s.contains("mean")) p.mean = number(s, "mean");
  if (s.contains("variance")) p.variance = number(s, "variance");
  if (s.contains("family")) p.family = parse_noise_family(text(s, "family"));
  if (s.contains("coefficients")) p.coefficients = list<double>(s, "coefficients");
  p.weights = w;
  p.noise = noise;
  p.pi0 = pi0_options(s, key + ".");
  return scenario_init(text(s, "kind"), p);
}

std::vector<SpaceTimePoint> points_field(const json& cfg, const std::string& key) {
  const json& v = field(cfg, key);
  if (!v.is_array() || v.empty()) bad_field(key, "expected a nonempty array of [t, r] pairs");
  std::vector<SpaceTimePoint> pts;
  for (const auto& e : v) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      bad_field(key, "expected [t, r] pairs");
    }
    pts.push_back({e[0].get<double>(), e[1].get<double>()});
    if (pts.back().t < 0.0) bad_field(key, "t must be >= 0");
  }
  return pts;
}

json record(const std::string& statistic, double value, std::optional<double> stderr_value = {},
            json params = json::object()) {
  json r = {{"statistic", statistic}, {"value", value}, {"params", std::move(params)}};
  r["stderr"] = stderr_value ? json(*stderr_value) : json(nullptr);
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

unsigned workers_of(const json& cfg) { return static_cast<unsigned>(integer(cfg, "workers")); }
std::uint64_t seed_of(const json& cfg) { return field(cfg, "seed").get<std::uint64_t>(); }

// ---------------------------------------------------------------- runners

ExperimentResult run_potential(const json& cfg) {
  const WeightVector w = weights_field(cfg, "weights");
  PotentialOptions opt;
  opt.series_max_steps = integer(cfg, "series_max_steps");
  if (!cfg.at("series_target").is_null()) opt.series_target = number(cfg, "series_target");
  const PotentialMethod method = parse_potential_method(text(cfg, "method"));
  const PotentialTable table = potential_kernel(w, integer(cfg, "x_max"), method, opt);

  ExperimentResult res;
  std::ostringstream csv;
  table.write_csv(csv);
  res.detail_csv = csv.str();

  const double harm = table.harmonicity_residual(q_kernel(w));
  double sum_d = 0.0;
  for (Site x = -(table.x_max() - 1); x <= table.x_max() - 1; ++x) sum_d += table.second_difference(x);
  bool positive = table.a(0) == 0.0;
  for (Site x = 1; x <= table.x_max(); ++x) positive = positive && table.a(x) > 0.0;

  res.records.push_back(record("sigma1_sq", w.variance()));
  res.records.push_back(record("harmonicity_residual", harm));
  res.records.push_back(record("sum_second_differences", sum_d, {}, {{"range", table.x_max() - 1}}));
  res.records.push_back(record("inverse_sigma1_sq", 1.0 / w.variance()));
  if (method == PotentialMethod::series) {
    double worst = 0.0;
    for (Site x = 0; x <= table.x_max(); ++x) worst = std::max(worst, table.tail_bound(x));
    res.records.push_back(record("series_steps", static_cast<double>(table.series_steps())));
    res.records.push_back(record("max_tail_bound", worst));
    res.records.push_back(record("uniform_decay_constant", table.uniform_decay_constant()));
  }
  res.checks.push_back({"a(0)=0 and a(x)>0 for x!=0", positive ? 1.0 : 0.0, "== 1", positive});
  if (method == PotentialMethod::fourier) res.checks.push_back({"harmonicity residual", harm, "<= 1e-8", harm <= 1e-8});
  return res;
}

ExperimentResult run_covariance(const json& cfg) {
  const WeightVector w = weights_field(cfg, "weights");
  const NoiseSpec noise = noise_field(cfg);
  const Site x_max = integer(cfg, "x_max");
  const Site fit_max = integer(cfg, "fit_max");
  if (fit_max + 2 > x_max) bad_field("fit_max", "must leave held-out lags below x_max - 1");
  const PotentialTable table = potential_kernel(w, x_max);
  const double s2 = noise.variance;
  const ExponentialBound bound = fit_exponential_bound(table, s2, fit_max);
  const SpectralRatio ratio(q_kernel(w));

  ExperimentResult res;
  std::ostringstream csv;
  csv << "x,cov0,spectral_inversion,exp_bound,held_out\n";
  double sum = 0.0;
  double inversion_gap = 0.0;
  bool held = true;
  for (Site x = -(x_max - 1); x <= x_max - 1; ++x) {
    const double c = cov0(table, s2, x);
    sum += c;
    std::string inv;
    if (std::abs(x) <= 8) {
      const double k = static_cast<double>(x);
      auto f = [&](double th) { return s2 / std::numbers::pi * ratio(th) * std::cos(k * th); };
      const auto r = quad::integrate(f, 0.0, std::numbers::pi, {1e-12, 0.0, 4000}, 4);
      if (!r.converged) throw Error(ErrorKind::QuadratureFailure, "spectral inversion");
      inversion_gap = std::max(inversion_gap, std::abs(2.0 * r.value - c));
      inv = fmt(2.0 * r.value);
    }
    const bool out_of_fit = std::abs(x) > fit_max;
    if (out_of_fit) held = held && bound.holds(x, c);
    csv << x << ',' << fmt(c) << ',' << inv << ',' << fmt(bound.A * std::exp(-bound.c * std::abs(double(x)))) << ','
        << (out_of_fit ? 1 : 0) << '\n';
  }
  res.detail_csv = csv.str();
  // tail of the sum past the table, from the fitted bound
  const double J = static_cast<double>(x_max - 1);
  const double tail = bound.c > 0.0 ? 2.0 * bound.A * std::exp(-bound.c * (J + 1.0)) / (1.0 - std::exp(-bound.c)) : 0.0;
  const double target = s2 / w.variance();

  res.records.push_back(record("sum_cov0", sum, {}, {{"range", x_max - 1}, {"tail_bound", tail}}));
  res.records.push_back(record("sigma_xi_sq_over_sigma1_sq", target));
  res.records.push_back(record("spectral_density_at_0", spectral_density(w, s2, 0.0)));
  res.records.push_back(record("max_spectral_inversion_gap", inversion_gap, {}, {{"lags", 8}}));
  res.records.push_back(record("exp_bound_A", bound.A));
  res.records.push_back(record("exp_bound_c", bound.c, {}, {{"fit_max", fit_max}, {"points", bound.fitted_points}}));
  res.checks.push_back({"sum of cov0 = sigma_xi^2/sigma1^2", std::abs(sum - target), "<= 1e-6",
                        std::abs(sum - target) <= 1e-6 && tail <= 1e-6});
  res.checks.push_back({"spectral inversion |k|<=8", inversion_gap, "<= 1e-6", inversion_gap <= 1e-6});
  res.checks.push_back({"exponential bound on held-out lags", held ? 1.0 : 0.0, "== 1", held});
  return res;
}

ExperimentResult run_pi0_sample(const json& cfg) {
  const WeightVector w = weights_field(cfg, "weights");
  const NoiseSpec noise = noise_field(cfg);
  const auto window = list<std::int64_t>(cfg, "window");
  if (window.size() != 2 || window[1] < window[0] + w.reach() + 1) {
    bad_field("window", "expected [first, last] wide enough for one step");
  }
  const auto replicas = static_cast<std::size_t>(integer(cfg, "replicas"));
  const std::uint64_t seed = seed_of(cfg);
  const Pi0Sampler sampler(w, noise, window[0], window[1], pi0_options(field(cfg, "pi0"), "pi0."));

  ExperimentResult res;
  const Pi0Sample first = sampler.sample(derive_seed(seed, 0));
  std::ostringstream csv;
  write_field_csv(csv, first.field, "seed=" + std::to_string(seed) + " replica=0 mode=" +
                                  (first.mode == Pi0Mode::gaussian_exact ? "gaussian_exact" : "truncated"));
  res.detail_csv = csv.str();
  res.records.push_back(record("truncation_error", first.truncation_error));
  if (replicas < 2) return res;

  // moments at the window centre before and after one increment step
  HarnessStepper probe(w);
  const auto [lo1, hi1] = probe.window_after(window[0], window[1], 1);
  const Site mid = std::clamp<Site>((window[0] + window[1]) / 2, lo1, hi1 - 1);
  std::vector<double> v0(replicas), v1(replicas), u0(replicas), u1(replicas);
  for_each_replica(replicas, workers_of(cfg), [&](std::size_t r) {
    const std::uint64_t rs = derive_seed(seed, r);
    FieldWindow eta = sampler.sample(rs).field;
    v0[r] = eta(mid);
    v1[r] = eta(mid + 1);
    HarnessStepper stepper(w);
    stepper.step_increments(eta, NoiseRealization(derive_seed(rs, 7), noise), 1);
    u0[r] = eta(mid);
    u1[r] = eta(mid + 1);
  });
  const PotentialTable table = potential_kernel(w, 4);
  const double c0 = cov0(table, noise.variance, 0);
  const double c1 = cov0(table, noise.variance, 1);
  auto add = [&](const std::string& name, const stats::Estimate& e, double target) {
    res.records.push_back(record(name, e.value, e.std_error, {{"target", target}, {"site", mid}}));
    const double gap = std::abs(e.value - target);
    res.checks.push_back({name, gap, "<= 3 SE = " + fmt(3.0 * e.std_error), gap <= 3.0 * e.std_error});
  };
  add("variance", stats::variance_estimate(v0), c0);
  add("lag1_covariance", stats::covariance_estimate(v0, v1), c1);
  add("variance_after_step", stats::variance_estimate(u0), c0);
  add("lag1_covariance_after_step", stats::covariance_estimate(u0, u1), c1);
  return res;
}

ExperimentResult run_hydro(const json& cfg) {
  const WeightVector w = weights_field(cfg, "weights");
  const NoiseSpec noise = noise_field(cfg);
  const std::string name = text(cfg, "profile");
  Profile u;
  if (name == "sin")
    u = [](double x) { return std::sin(x); };
  else if (name == "linear")
    u = [](double x) { return x; };
  else if (name == "zero")
    u = [](double) { return 0.0; };
  else
    bad_field("profile", "expected sin, linear or zero");
  const auto n_list = list<std::int64_t>(cfg, "n_list");
  for (auto n : n_list)
    if (n < 8) bad_field("n_list", "entries must be >= 8");
  const double t = number(cfg, "t");
  const double R = number(cfg, "R");
  const std::uint64_t seed = seed_of(cfg);

  ExperimentResult res;
  std::ostringstream csv;
  csv << "n,error\n";
  std::vector<double> errors;
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    const double e = hydrodynamic_profile_error(u, w, noise, n_list[k], t, R, derive_seed(seed, k));
    errors.push_back(e);
    csv << n_list[k] << ',' << fmt(e) << '\n';
    res.records.push_back(record("profile_error", e, {}, {{"n", n_list[k]}, {"t", t}, {"R", R}}));
  }
  res.detail_csv = csv.str();
  if (noise.variance == 0.0 && name != "sin") {
    for (std::size_t k = 0; k < n_list.size(); ++k) {
      const double cap = 2.0 / static_cast<double>(n_list[k]);
      res.checks.push_back({"noiseless error n=" + std::to_string(n_list[k]), errors[k], "<= 2/n", errors[k] <= cap});
    }
  } else if (n_list.size() >= 2) {
    res.checks.push_back({"error shrinks from smallest to largest n", errors.back(), "< " + fmt(errors.front()),
                          errors.back() < errors.front()});
  }
  return res;
}

ExperimentResult run_coupling(const json& cfg) {
  const WeightVector w = weights_field(cfg, "weights");
  const NoiseSpec noise = noise_field(cfg);
  auto T_list = list<std::int64_t>(cfg, "T_list");
  std::sort(T_list.begin(), T_list.end());
  const Scenario a = scenario_field(cfg, "first_law", w, noise);
  const Scenario b = scenario_field(cfg, "second_law", w, noise);
  HarnessStepper probe(w);
  const auto [lo, hi] = probe.window_before(0, 0, T_list.back());
  const auto points = coupling_decay(a.generator(lo, hi), b.generator(lo, hi), w, noise, T_list,
                                     static_cast<std::size_t>(integer(cfg, "replicas")), seed_of(cfg), workers_of(cfg));
  ExperimentResult res;
  std::ostringstream csv;
  csv << "T,mean_abs_diff,stderr\n";
  for (const auto& p : points) {
    csv << p.T << ',' << fmt(p.mean_abs_diff) << ',' << fmt(p.std_error) << '\n';
    res.records.push_back(record("mean_abs_diff", p.mean_abs_diff, p.std_error, {{"T", p.T}}));
  }
  res.detail_csv = csv.str();
  if (points.size() >= 2) {
    const double ratio = points.back().mean_abs_diff / points.front().mean_abs_diff;
    res.checks.push_back({"decay ratio last/first T", ratio, "< 0.5", ratio < 0.5});
  }
  return res;
}

ExperimentResult run_fluctuation(const json& cfg) {
  const WeightVector w = weights_field(cfg, "weights");
  const NoiseSpec noise = noise_field(cfg);
  const Scenario sc = scenario_field(cfg, "scenario", w, noise);
  const auto pts = points_field(cfg, "points");
  const std::int64_t n = integer(cfg, "n");
  if (n < 16) bad_field("n", "must be >= 16");
  const auto rows = limit_covariance_report(w, sc, noise, n, pts, static_cast<std::size_t>(integer(cfg, "replicas")),
                                            seed_of(cfg), workers_of(cfg));
  ExperimentResult res;
  std::ostringstream csv;
  csv << "i,j,t1,r1,t2,r2,mc_cov,mc_stderr,z_cov,band,pass\n";
  int passed = 0;
  for (const auto& r : rows) {
    csv << r.i << ',' << r.j << ',' << fmt(r.p1.t) << ',' << fmt(r.p1.r) << ',' << fmt(r.p2.t) << ',' << fmt(r.p2.r)
        << ',' << fmt(r.mc) << ',' << fmt(r.mc_stderr) << ',' << fmt(r.z) << ',' << fmt(r.band) << ','
        << (r.pass ? 1 : 0) << '\n';
    res.records.push_back(record("covariance", r.mc, r.mc_stderr,
                                 {{"p1", {r.p1.t, r.p1.r}}, {"p2", {r.p2.t, r.p2.r}}, {"z_cov", r.z}}));
    passed += r.pass ? 1 : 0;
  }
  res.detail_csv = csv.str();
  res.records.push_back(record("varsigma_sq", sc.varsigma_sq, {}, {{"scenario", to_string(sc.kind)}}));
  res.checks.push_back({"pairs within max(3 SE, 0.1|z|+0.02)", static_cast<double>(passed),
                        "== " + std::to_string(rows.size()), passed == static_cast<int>(rows.size())});
  return res;
}

ExperimentResult run_scaling(const json& cfg) {
  const WeightVector w = weights_field(cfg, "weights");
  const NoiseSpec noise = noise_field(cfg);
  const Scenario sc = scenario_field(cfg, "scenario", w, noise);
  const auto r = scaling_exponents(w, sc, noise, list<std::int64_t>(cfg, "n_list"), list<double>(cfg, "t_list"),
                                   integer(cfg, "hurst_n"), static_cast<std::size_t>(integer(cfg, "replicas")),
                                   seed_of(cfg), workers_of(cfg));
  ExperimentResult res;
  std::ostringstream csv;
  csv << "series,x,variance\n";
  for (std::size_t k = 0; k < r.n_list.size(); ++k) csv << "space," << r.n_list[k] << ',' << fmt(r.space_variance[k]) << '\n';
  for (std::size_t k = 0; k < r.t_list.size(); ++k) csv << "time," << fmt(r.t_list[k]) << ',' << fmt(r.time_variance[k]) << '\n';
  res.detail_csv = csv.str();
  res.records.push_back(record("space_slope", r.space_slope));
  res.records.push_back(record("time_slope", r.time_slope));
  res.records.push_back(record("hurst", r.hurst, {}, {{"n", integer(cfg, "hurst_n")}}));
  res.checks.push_back({"space slope", r.space_slope, "in [0.4, 0.6]", r.space_slope >= 0.4 && r.space_slope <= 0.6});
  res.checks.push_back({"Hurst estimate", r.hurst, "in [0.20, 0.30]", r.hurst >= 0.2 && r.hurst <= 0.3});
  return res;
}

ExperimentResult run_lclt(const json& cfg) {
  const WeightVector w = weights_field(cfg, "weights");
  const auto grid = list<std::int64_t>(cfg, "t_grid");
  const ErrorProfile prof = lclt_error_profile(w, grid);
  const CharFunctionBound cb = char_function_bound(w, static_cast<int>(integer(cfg, "char_grid")));
  ExperimentResult res;
  std::ostringstream csv;
  prof.write_csv(csv);
  res.detail_csv = csv.str();
  res.records.push_back(record("sup_slope", prof.fitted_slope));
  res.records.push_back(record("grad_slope", prof.grad_slope));
  res.records.push_back(record("char_function_b", cb.b, {}, {{"grid_points", cb.grid_points}}));
  const double worst = *std::max_element(prof.scaled.begin(), prof.scaled.end());
  bool monotone = true;
  for (std::size_t k = 1; k < prof.sup_errors.size(); ++k) monotone = monotone && prof.sup_errors[k] <= prof.sup_errors[k - 1];
  res.checks.push_back({"max t*sup_err / first", worst / prof.scaled.front(), "<= 1.5", worst <= 1.5 * prof.scaled.front()});
  res.checks.push_back({"sup-error slope", prof.fitted_slope, "<= -0.8", prof.fitted_slope <= -0.8});
  res.checks.push_back({"gradient slope - sup slope", prof.grad_slope - prof.fitted_slope, "<= -0.3",
                        prof.grad_slope <= prof.fitted_slope - 0.3});
  res.checks.push_back({"sup_err non-increasing", monotone ? 1.0 : 0.0, "== 1", monotone});
  res.checks.push_back({"|phi~| <= 1 - b theta^2", cb.b, "> 0, holds on and off grid",
                        cb.b > 0.0 && cb.holds_on_grid && cb.holds_off_grid});
  return res;
}

ExperimentResult run_green_sum(const json& cfg) {
  LatticeDistribution d;
  try {
    d = validate_weights(parse_weight_map(text(cfg, "step_law"))).distribution();
  } catch (const Error& e) {
    bad_field("step_law", e.what());
  }
  const auto rows = green_sum_convergence(d, number(cfg, "t"), number(cfg, "a"), list<std::int64_t>(cfg, "n_grid"));
  ExperimentResult res;
  std::ostringstream csv;
  csv << "n,finite_sum,limit\n";
  for (const auto& r : rows) {
    csv << r.n << ',' << fmt(r.finite_sum) << ',' << fmt(r.limit) << '\n';
    res.records.push_back(record("finite_sum", r.finite_sum, {}, {{"n", r.n}, {"limit", r.limit}}));
  }
  res.detail_csv = csv.str();
  const double gap = std::abs(rows.back().finite_sum - rows.back().limit);
  res.checks.push_back({"finite sum at largest n vs limit", gap, "<= 0.03", gap <= 0.03});
  return res;
}

}  // namespace

json default_config(std::string_view experiment) {
  json c = {{"experiment", std::string(experiment)}, {"workers", 1}, {"out", "out"}};
  const std::string e(experiment);
  if (e == "potential") {
    c.update({{"weights", "0:0.5,1:0.5"}, {"x_max", 32}, {"method", "fourier"}, {"series_max_steps", 4096},
              {"series_target", nullptr}});
  } else if (e == "covariance") {
    c.update({{"weights", "0:0.5,1:0.5"}, {"noise", noise_default()}, {"x_max", 64}, {"fit_max", 24}});
  } else if (e == "pi0-sample") {
    c.update({{"weights", "0:0.5,1:0.5"}, {"noise", noise_default()}, {"window", {-64, 64}}, {"replicas", 1},
              {"pi0", {{"pi0_mode", "auto"}, {"truncation_K", 4096}, {"tolerance", nullptr}}}});
  } else if (e == "hydro") {
    c.update({{"weights", "0:0.5,1:0.5"}, {"noise", noise_default()}, {"profile", "sin"}, {"n_list", {32, 256}},
              {"t", 1.0}, {"R", 1.0}});
  } else if (e == "coupling") {
    c.update({{"weights", "0:0.5,1:0.5"}, {"noise", noise_default()}, {"T_list", {16, 1024}}, {"replicas", 1000},
              {"first_law", {{"kind", "iid"}, {"family", "centered-uniform"}, {"variance", 1.0}}},
              {"second_law", {{"kind", "pi0"}}}});
  } else if (e == "fluctuation") {
    c.update({{"weights", "0:0.5,1:0.5"}, {"noise", noise_default()}, {"scenario", {{"kind", "pi0"}}}, {"n", 256},
              {"points", grid_3x3()}, {"replicas", 1000}});
  } else if (e == "scaling") {
    c.update({{"weights", "0:0.5,1:0.5"}, {"noise", noise_default()}, {"scenario", {{"kind", "pi0"}}},
              {"n_list", {64, 128, 256, 512}}, {"t_list", {0.25, 0.5, 1.0, 2.0, 4.0}}, {"hurst_n", 256},
              {"replicas", 2000}});
  } else if (e == "lclt") {
    c.update({{"weights", "-1:0.5,0:0.25,2:0.25"}, {"t_grid", {16, 32, 64, 128, 256, 512, 1024, 2048, 4096}},
              {"char_grid", 10000}});
  } else if (e == "green-sum") {
    c.update({{"step_law", "-1:0.25,0:0.5,1:0.25"}, {"t", 1.0}, {"a", 0.0}, {"n_grid", {256, 1024, 4096}}});
  } else {
    throw Error(ErrorKind::Validation, "field 'experiment': unknown experiment '" + e + "'");
  }
  return c;
}

json resolve_config(const json& file, const json& overrides) {
  if (!file.is_object() || !overrides.is_object()) throw Error(ErrorKind::ConfigParse, "config must be an object");
  std::string experiment;
  if (overrides.contains("experiment"))
    experiment = text(overrides, "experiment");
  else if (file.contains("experiment"))
    experiment = text(file, "experiment");
  else
    throw Error(ErrorKind::Validation, "field 'experiment': missing");

  json cfg = default_config(experiment);
  for (const json* layer : {&file, &overrides}) {
    for (const auto& [k, v] : layer->items()) {
      if (k != "seed" && !cfg.contains(k)) throw Error(ErrorKind::ConfigParse, "unknown field '" + k + "'");
      if (v.is_object() && cfg.contains(k) && cfg[k].is_object() && k != "first_law" && k != "second_law" &&
          k != "scenario") {
        for (const auto& [kk, vv] : v.items()) {
          if (!cfg[k].contains(kk)) throw Error(ErrorKind::ConfigParse, "unknown field '" + k + "." + kk + "'");
          cfg[k][kk] = vv;
        }
      } else {
        cfg[k] = v;
      }
    }
  }
  cfg["experiment"] = experiment;

  if (!cfg.contains("seed")) bad_field("seed", "missing (there is no clock-based default)");
  if (!cfg["seed"].is_number_unsigned() && !(cfg["seed"].is_number_integer() && cfg["seed"].get<std::int64_t>() >= 0)) {
    bad_field("seed", "expected a nonnegative integer");
  }
  if (integer(cfg, "workers") < 1) bad_field("workers", "must be >= 1");
  if (!cfg["out"].is_string()) bad_field("out", "expected a string");
  if (cfg.contains("replicas") && integer(cfg, "replicas") < 1) bad_field("replicas", "must be >= 1");
  for (const char* g : {"n_list", "t_list", "T_list", "t_grid", "n_grid", "points", "window"}) {
    if (cfg.contains(g) && (!cfg[g].is_array() || cfg[g].empty())) bad_field(g, "expected a nonempty array");
  }
  if (cfg.contains("weights")) weights_field(cfg, "weights");
  if (cfg.contains("noise")) noise_field(cfg);
  if (cfg.contains("x_max") && integer(cfg, "x_max") < 2) bad_field("x_max", "must be >= 2");
  if (cfg.contains("method")) {
    try {
      parse_potential_method(text(cfg, "method"));
    } catch (const Error& e) {
      bad_field("method", e.what());
    }
  }
  return cfg;
}

std::string config_hash(const json& resolved) {
  // where the files go and how many threads compute them do not change the results
  json key = resolved;
  key.erase("out");
  key.erase("workers");
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : key.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

bool ExperimentResult::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

ExperimentResult run_experiment(const json& resolved) {
  const std::string e = text(resolved, "experiment");
  if (e == "potential") return run_potential(resolved);
  if (e == "covariance") return run_covariance(resolved);
  if (e == "pi0-sample") return run_pi0_sample(resolved);
  if (e == "hydro") return run_hydro(resolved);
  if (e == "coupling") return run_coupling(resolved);
  if (e == "fluctuation") return run_fluctuation(resolved);
  if (e == "scaling") return run_scaling(resolved);
  if (e == "lclt") return run_lclt(resolved);
  if (e == "green-sum") return run_green_sum(resolved);
  bad_field("experiment", "unknown experiment '" + e + "'");
}

void write_outputs(const json& resolved, const ExperimentResult& result, double elapsed_seconds,
                   const OutputOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(options.out_dir);
  const std::string hash = config_hash(resolved);
  const json elapsed = options.record_timing ? json(elapsed_seconds) : json(nullptr);
  const json provenance = {{"tool", kToolName},      {"version", tool_version()}, {"build", build_tag()},
                           {"config_hash", hash},    {"seed", resolved.at("seed")},
                           {"elapsed_seconds", elapsed}};

  json summary = provenance;
  summary["experiment"] = resolved.at("experiment");
  summary["records"] = result.records;
  json checks = json::array();
  for (const auto& c : result.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"band", c.band}, {"pass", c.pass}});
  }
  summary["checks"] = checks;
  summary["pass"] = result.all_pass();
  std::ofstream(options.out_dir / "summary.json") << summary.dump(2) << '\n';

  json echoed = resolved;
  echoed["provenance"] = provenance;
  std::ofstream(options.out_dir / "config.resolved.json") << echoed.dump(2) << '\n';

  std::ofstream csv(options.out_dir / "detail.csv");
  csv << "# tool=" << kToolName << " version=" << tool_version() << " build=" << build_tag() << '\n'
      << "# config_hash=" << hash << " seed=" << resolved.at("seed").dump()
      << " elapsed_seconds=" << elapsed.dump() << '\n'
      << result.detail_csv;
}

}  // namespace harness
