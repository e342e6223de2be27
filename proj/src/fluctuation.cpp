#include "harness/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "harness/error.hpp"
#include "harness/parallel.hpp"
#include "harness/stats.hpp"

namespace harness {

std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::iid:
      return "iid";
    case ScenarioKind::pi0:
      return "pi0";
    case ScenarioKind::m_dependent:
      return "m_dependent";
  }
  return "?";
}

ScenarioKind parse_scenario_kind(std::string_view name) {
  if (name == "iid") return ScenarioKind::iid;
  if (name == "pi0") return ScenarioKind::pi0;
  if (name == "m_dependent" || name == "m-dependent") return ScenarioKind::m_dependent;
  throw Error(ErrorKind::UnknownKind, "unknown scenario kind '" + std::string(name) + "'");
}

Scenario scenario_init(std::string_view kind, const ScenarioParams& params) {
  return scenario_init(parse_scenario_kind(kind), params);
}

Scenario scenario_init(ScenarioKind kind, const ScenarioParams& params) {
  Scenario s;
  s.kind = kind;
  s.mu0 = params.mean.value_or(0.0);
  auto need = [&](bool present, const char* field) {
    if (!present) {
      throw Error(ErrorKind::IncompleteParams,
                  std::string(to_string(kind)) + " scenario needs '" + field + "'");
    }
  };
  switch (kind) {
    case ScenarioKind::iid: {
      need(params.variance.has_value(), "variance");
      if (*params.variance < 0.0) throw Error(ErrorKind::Validation, "variance must be >= 0");
      s.family = params.family.value_or(NoiseFamily::gaussian);
      s.sigma0_sq = *params.variance;
      s.varsigma_sq = s.sigma0_sq;
      break;
    }
    case ScenarioKind::pi0: {
      need(params.weights.has_value(), "weights");
      need(params.noise.has_value(), "noise");
      s.weights = *params.weights;
      s.noise = *params.noise;
      s.pi0 = params.pi0;
      const PotentialTable table = potential_kernel(*s.weights, 2);
      s.sigma0_sq = cov0(table, s.noise.variance, 0);
      s.varsigma_sq = s.noise.variance / s.weights->variance();
      break;
    }
    case ScenarioKind::m_dependent: {
      need(params.coefficients.has_value() && !params.coefficients->empty(), "coefficients");
      need(params.variance.has_value(), "variance");
      if (*params.variance < 0.0) throw Error(ErrorKind::Validation, "variance must be >= 0");
      s.family = params.family.value_or(NoiseFamily::gaussian);
      s.coefficients = *params.coefficients;
      s.base_variance = *params.variance;
      double sum = 0.0;
      double sum_sq = 0.0;
      for (double c : s.coefficients) {
        sum += c;
        sum_sq += c * c;
      }
      s.sigma0_sq = s.base_variance * sum_sq;
      s.varsigma_sq = s.base_variance * sum * sum;
      break;
    }
  }
  return s;
}

FieldGenerator Scenario::generator(Site first, Site last) const {
  const double mean = mu0;
  switch (kind) {
    case ScenarioKind::iid:
      return iid_field(family, sigma0_sq, mean);
    case ScenarioKind::pi0: {
      auto sampler = std::make_shared<const Pi0Sampler>(*weights, noise, first, last, pi0);
      return [sampler, mean](Site lo, Site hi, std::uint64_t seed) {
        FieldWindow f = sampler->sample(seed).field.crop(lo, hi);
        if (mean != 0.0) f.values.array() += mean;
        return f;
      };
    }
    case ScenarioKind::m_dependent: {
      const std::vector<double> c = coefficients;
      const NoiseSpec base{family, base_variance};
      return [c, base, mean](Site lo, Site hi, std::uint64_t seed) {
        const NoiseRealization eps(seed, base);
        const Site m = static_cast<Site>(c.size()) - 1;
        std::vector<double> e(static_cast<std::size_t>(hi - lo + 1 + m));
        eps.fill_row(0, lo - m, e);
        FieldWindow f = FieldWindow::constant(lo, hi, mean);
        for (Eigen::Index j = 0; j < f.size(); ++j) {
          double v = 0.0;
          for (Site l = 0; l <= m; ++l) v += c[static_cast<std::size_t>(l)] * e[static_cast<std::size_t>(j + m - l)];
          f.values[j] += v;
        }
        return f;
      };
    }
  }
  throw Error(ErrorKind::UnknownKind, "scenario kind");
}

LimitSpec limit_spec(const WeightVector& w, const Scenario& s, const NoiseSpec& noise) {
  return {w.variance(), noise.variance, s.varsigma_sq, s.mu0};
}

Site fluctuation_site(const WeightVector& w, std::int64_t n, const SpaceTimePoint& p) {
  const double nd = static_cast<double>(n);
  return static_cast<Site>(std::floor(nd * p.t * w.speed())) + static_cast<Site>(std::floor(p.r * std::sqrt(nd)));
}

std::int64_t fluctuation_steps(std::int64_t n, const SpaceTimePoint& p) {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(n) * p.t));
}

namespace {

struct Plan {
  std::vector<std::int64_t> steps;
  std::vector<Site> sites;
  std::vector<std::size_t> order;  // points by ascending step count
  Site lo = 0;                     // initial height window
  Site hi = 0;
  Site eta_lo = 0;
  Site eta_hi = 0;
};

Plan make_plan(const WeightVector& w, std::int64_t n, const std::vector<SpaceTimePoint>& points) {
  if (points.empty()) throw Error(ErrorKind::Validation, "no fluctuation points");
  Plan plan;
  Site lo = std::numeric_limits<Site>::max();
  Site hi = std::numeric_limits<Site>::min();
  for (const auto& p : points) {
    if (!(p.t >= 0.0)) throw Error(ErrorKind::Validation, "fluctuation point needs t >= 0");
    const std::int64_t T = fluctuation_steps(n, p);
    const Site y = fluctuation_site(w, n, p);
    plan.steps.push_back(T);
    plan.sites.push_back(y);
    lo = std::min(lo, y + T * w.min_offset());
    hi = std::max(hi, y + T * w.max_offset());
  }
  plan.order.resize(points.size());
  std::iota(plan.order.begin(), plan.order.end(), std::size_t{0});
  std::stable_sort(plan.order.begin(), plan.order.end(),
                   [&](std::size_t a, std::size_t b) { return plan.steps[a] < plan.steps[b]; });
  plan.lo = lo;
  plan.hi = hi;
  plan.eta_lo = std::min<Site>(lo, 0) + 1;
  plan.eta_hi = std::max<Site>(std::max<Site>(hi, 0), plan.eta_lo);
  return plan;
}

}  // namespace

std::pair<Site, Site> increment_window(const WeightVector& w, std::int64_t n,
                                       const std::vector<SpaceTimePoint>& points) {
  const Plan plan = make_plan(w, n, points);
  return {plan.eta_lo, plan.eta_hi};
}

std::vector<FluctuationSample> fluctuation_samples(const WeightVector& w, const Scenario& scenario,
                                                   const NoiseSpec& noise, std::int64_t n,
                                                   const std::vector<SpaceTimePoint>& points,
                                                   std::size_t replicas, std::uint64_t seed, unsigned workers,
                                                   const SimulationBudget& budget) {
  if (n < 1) throw Error(ErrorKind::Validation, "n must be >= 1");
  if (replicas == 0) throw Error(ErrorKind::Validation, "need at least one replica");
  const Plan plan = make_plan(w, n, points);
  if (plan.hi - plan.lo + 1 > budget.max_window || plan.eta_hi - plan.eta_lo + 1 > budget.max_window) {
    throw Error(ErrorKind::BudgetExceeded, "height window of " + std::to_string(plan.hi - plan.lo + 1) +
                                               " sites exceeds the budget of " +
                                               std::to_string(budget.max_window));
  }
  const FieldGenerator draw = scenario.generator(plan.eta_lo, plan.eta_hi);
  const double scale = std::pow(static_cast<double>(n), -0.25);
  const double root_n = std::sqrt(static_cast<double>(n));

  std::vector<FluctuationSample> out(replicas);
  for_each_replica(replicas, workers, [&](std::size_t r) {
    const std::uint64_t rs = derive_seed(seed, r);
    const FieldWindow eta0 = draw(plan.eta_lo, plan.eta_hi, derive_seed(rs, 1));
    FieldWindow h = heights_from_increments(eta0, plan.lo, plan.hi);
    const NoiseRealization xi(derive_seed(rs, 0), noise);
    HarnessStepper stepper(w);

    FluctuationSample& s = out[r];
    s.n = n;
    s.points = points;
    s.seed = rs;
    s.values.assign(points.size(), 0.0);
    std::int64_t t = 0;
    for (std::size_t k : plan.order) {
      for (; t < plan.steps[k]; ++t) stepper.step_heights(h, xi, t + 1);
      s.values[k] = scale * (h(plan.sites[k]) - scenario.mu0 * points[k].r * root_n);
    }
  });
  return out;
}

double Decomposition::residual(double mu0) const {
  return std::abs(mu0 * hbar + sbar + fbar - h) / std::max(1.0, std::abs(h));
}

Decomposition decompose_fluctuation(const WeightVector& w, const FieldWindow& eta0, const NoiseRealization& noise,
                                    std::int64_t n, const SpaceTimePoint& point, double mu0) {
  const std::int64_t T = fluctuation_steps(n, point);
  if (T > 4096) throw Error(ErrorKind::BudgetExceeded, "exact decomposition is limited to 4096 steps");
  const Site y = fluctuation_site(w, n, point);
  const double scale = std::pow(static_cast<double>(n), -0.25);
  const double root_n = std::sqrt(static_cast<double>(n));

  std::vector<LatticeDistribution> powers;
  powers.reserve(static_cast<std::size_t>(T + 1));
  powers.push_back(LatticeDistribution::dirac(0));
  for (std::int64_t m = 1; m <= T; ++m) powers.push_back(convolve(powers.back(), w.distribution()));
  const LatticeDistribution& pT = powers.back();

  // X_T^y = y + pT.offset + j with probability pT.masses[j]
  const Site x_lo = y + pT.first();
  const Site x_hi = y + pT.last();
  const Site need_lo = std::min<Site>(x_lo, 0) + 1;
  const Site need_hi = std::max<Site>(x_hi, 0);
  if (need_lo <= need_hi && !eta0.covers(need_lo, need_hi)) {
    throw Error(ErrorKind::WindowTooSmall, "initial increments do not cover the walk's range");
  }

  Decomposition d;
  double mean_x = 0.0;
  for (Eigen::Index j = 0; j < pT.size(); ++j) mean_x += pT.masses[j] * static_cast<double>(x_lo + j);
  d.hbar = scale * (mean_x - point.r * root_n);

  // cdf[j] = P(X <= x_lo + j)
  Eigen::VectorXd cdf(pT.size());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < pT.size(); ++j) cdf[j] = (acc += pT.masses[j]);
  auto below = [&](Site i) {  // P(X < i)
    if (i <= x_lo) return 0.0;
    if (i > x_hi) return 1.0;
    return cdf[i - 1 - x_lo];
  };
  double s = 0.0;
  for (Site i = x_lo + 1; i <= 0; ++i) s -= (eta0(i) - mu0) * below(i);
  for (Site i = 1; i <= x_hi; ++i) s += (eta0(i) - mu0) * (1.0 - below(i));
  d.sbar = scale * s;

  double f = 0.0;
  if (!noise.silent()) {
    std::vector<double> row;
    for (std::int64_t k = 1; k <= T; ++k) {
      const LatticeDistribution& p = powers[static_cast<std::size_t>(T - k)];
      row.resize(static_cast<std::size_t>(p.size()));
      noise.fill_row(k, y + p.offset, row);
      for (Eigen::Index j = 0; j < p.size(); ++j) f += p.masses[j] * row[static_cast<std::size_t>(j)];
    }
  }
  d.fbar = scale * f;

  HarnessStepper stepper(w);
  const auto [lo, hi] = stepper.window_before(y, y, T);
  const FieldWindow h0 = heights_from_increments(eta0, lo, hi);
  const FieldWindow hT = evolve(h0, w, noise, T, y, y);
  d.h = scale * (hT(y) - mu0 * point.r * root_n);
  return d;
}

Eigen::MatrixXd sample_covariance(const std::vector<FluctuationSample>& samples) {
  if (samples.empty()) return {};
  const auto R = static_cast<Eigen::Index>(samples.size());
  const auto P = static_cast<Eigen::Index>(samples.front().values.size());
  Eigen::MatrixXd X(R, P);
  for (Eigen::Index r = 0; r < R; ++r)
    for (Eigen::Index p = 0; p < P; ++p) X(r, p) = samples[static_cast<std::size_t>(r)].values[static_cast<std::size_t>(p)];
  const Eigen::RowVectorXd mean = X.colwise().mean();
  X.rowwise() -= mean;
  return X.transpose() * X / static_cast<double>(std::max<Eigen::Index>(R - 1, 1));
}

std::vector<CovarianceRow> limit_covariance_report(const WeightVector& w, const Scenario& scenario,
                                                   const NoiseSpec& noise, std::int64_t n,
                                                   const std::vector<SpaceTimePoint>& grid, std::size_t replicas,
                                                   std::uint64_t seed, unsigned workers) {
  const auto samples = fluctuation_samples(w, scenario, noise, n, grid, replicas, seed, workers);
  const LimitSpec spec = limit_spec(w, scenario, noise);
  const std::size_t P = grid.size();
  std::vector<std::vector<double>> columns(P, std::vector<double>(replicas));
  for (std::size_t r = 0; r < replicas; ++r)
    for (std::size_t p = 0; p < P; ++p) columns[p][r] = samples[r].values[p];

  std::vector<CovarianceRow> rows;
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t j = i; j < P; ++j) {
      CovarianceRow row;
      row.i = i;
      row.j = j;
      row.p1 = grid[i];
      row.p2 = grid[j];
      const auto est = stats::covariance_estimate(columns[i], columns[j]);
      row.mc = est.value;
      row.mc_stderr = est.std_error;
      row.z = z_covariance(spec, grid[i], grid[j]);
      row.band = std::max(3.0 * row.mc_stderr, 0.1 * std::abs(row.z) + 0.02);
      row.pass = std::abs(row.mc - row.z) <= row.band;
      rows.push_back(row);
    }
  }
  return rows;
}

ScalingResult scaling_exponents(const WeightVector& w, const Scenario& scenario, const NoiseSpec& noise,
                                const std::vector<std::int64_t>& n_list, const std::vector<double>& t_list,
                                std::int64_t hurst_n, std::size_t replicas, std::uint64_t seed,
                                unsigned workers) {
  if (n_list.size() < 2 || t_list.size() < 2) {
    throw Error(ErrorKind::Validation, "scaling fits need at least two grid points");
  }
  ScalingResult res;
  res.n_list = n_list;
  res.t_list = t_list;

  std::vector<double> column(replicas);
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    const auto samples = fluctuation_samples(w, scenario, noise, n_list[k], {{1.0, 0.0}}, replicas,
                                             derive_seed(seed, 1000 + k), workers);
    for (std::size_t r = 0; r < replicas; ++r) column[r] = samples[r].values[0];
    // Var[n^{1/4} H_n] = sqrt(n) Var[H_n]
    res.space_variance.push_back(std::sqrt(static_cast<double>(n_list[k])) *
                                 stats::variance_estimate(column).value);
  }
  std::vector<SpaceTimePoint> points;
  for (double t : t_list) points.push_back({t, 0.0});
  const auto samples = fluctuation_samples(w, scenario, noise, hurst_n, points, replicas, derive_seed(seed, 2000),
                                           workers);
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t r = 0; r < replicas; ++r) column[r] = samples[r].values[p];
    res.time_variance.push_back(stats::variance_estimate(column).value);
  }

  Eigen::VectorXd nx(static_cast<Eigen::Index>(n_list.size()));
  for (std::size_t k = 0; k < n_list.size(); ++k) nx[static_cast<Eigen::Index>(k)] = static_cast<double>(n_list[k]);
  res.space_slope = stats::log_log_slope(nx, Eigen::Map<const Eigen::VectorXd>(res.space_variance.data(), nx.size()));
  const Eigen::Map<const Eigen::VectorXd> tx(t_list.data(), static_cast<Eigen::Index>(t_list.size()));
  res.time_slope = stats::log_log_slope(tx, Eigen::Map<const Eigen::VectorXd>(res.time_variance.data(), tx.size()));
  res.hurst = 0.5 * res.time_slope;
  return res;
}

}  // namespace harness
