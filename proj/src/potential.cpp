#include "harness/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <vector>

#include "harness/error.hpp"
#include "harness/harness_sim.hpp"
#include "harness/quadrature.hpp"
#include "harness/stats.hpp"

namespace harness {

std::string_view to_string(PotentialMethod m) {
  return m == PotentialMethod::fourier ? "fourier" : "series";
}

PotentialMethod parse_potential_method(std::string_view name) {
  if (name == "fourier") return PotentialMethod::fourier;
  if (name == "series") return PotentialMethod::series;
  throw Error(ErrorKind::Validation, "unknown potential method '" + std::string(name) + "'");
}

double PotentialTable::a(Site x) const {
  const Site ax = std::abs(x);
  if (ax > x_max_) throw Error(ErrorKind::TableTooSmall, "a(" + std::to_string(x) + ") outside table");
  return a_[ax];
}

double PotentialTable::second_difference(Site x) const {
  const Site ax = std::abs(x);
  if (ax + 1 > x_max_) {
    throw Error(ErrorKind::TableTooSmall,
                "D(" + std::to_string(x) + ") needs a table covering " + std::to_string(ax + 1));
  }
  return d_[ax];
}

double PotentialTable::tail_bound(Site x) const {
  const Site ax = std::abs(x);
  if (ax > x_max_) throw Error(ErrorKind::TableTooSmall, "tail bound outside table");
  return tail_.size() == 0 ? 0.0 : tail_[ax];
}

double PotentialTable::harmonicity_residual(const WeightVector& q) const {
  const Site reach = q.reach();
  double worst = 0.0;
  for (Site x = -(x_max_ - reach); x <= x_max_ - reach; ++x) {
    double s = 0.0;
    for (Site m = q.min_offset(); m <= q.max_offset(); ++m) s += q(m) * a(x + m);
    worst = std::max(worst, std::abs(s - a(x) - (x == 0 ? 1.0 : 0.0)));
  }
  return worst;
}

void PotentialTable::write_csv(std::ostream& os) const {
  os << "x,a,D\n";
  os.precision(17);
  for (Site x = -(x_max_ - 1); x <= x_max_ - 1; ++x) {
    os << x << ',' << a(x) << ',' << second_difference(x) << '\n';
  }
}

SpectralRatio::SpectralRatio(const WeightVector& q) {
  double second_moment = 0.0;
  for (Site x = 1; x <= q.max_offset(); ++x) {
    if (q(x) > 0.0) {
      half_.emplace_back(static_cast<double>(x), q(x));
      second_moment += 2.0 * q(x) * static_cast<double>(x * x);
    }
  }
  limit_at_zero_ = 1.0 / second_moment;
}

// 1 - cos t = 2 sin^2(t/2) and 1 - phi_Y(t) = 4 sum_{x>0} q(x) sin^2(xt/2)
double SpectralRatio::operator()(double theta) const {
  if (theta == 0.0) return limit_at_zero_;
  const double s = std::sin(0.5 * theta);
  double den = 0.0;
  for (const auto& [x, qx] : half_) {
    const double sx = std::sin(0.5 * x * theta);
    den += qx * sx * sx;
  }
  if (den <= 0.0) return limit_at_zero_;
  return s * s / (2.0 * den);
}

PotentialTable potential_kernel(const WeightVector& w, Site x_max, PotentialMethod method,
                                const PotentialOptions& options) {
  if (x_max < 2) throw Error(ErrorKind::Validation, "potential table needs x_max >= 2");
  const WeightVector q = q_kernel(w);

  PotentialTable table;
  table.x_max_ = x_max;
  table.method_ = method;
  table.sigma1_sq_ = w.variance();
  table.a_ = Eigen::VectorXd::Zero(x_max + 1);
  table.d_ = Eigen::VectorXd::Zero(x_max);

  if (method == PotentialMethod::fourier) {
    const SpectralRatio ratio(q);
    quad::Options qopt;
    qopt.abs_tol = options.quadrature_tol;
    qopt.max_intervals = options.max_panels;
    for (Site x = 0; x < x_max; ++x) {
      const double freq = static_cast<double>(x);
      // h is even: (1/pi) int_{-pi}^{pi} h e^{ixt} = (2/pi) int_0^pi h cos(xt)
      auto integrand = [&](double t) { return ratio(t) * std::cos(freq * t); };
      const int panels = static_cast<int>(std::min<Site>(x + 1, options.max_panels / 4));
      const auto r = quad::integrate(integrand, 0.0, std::numbers::pi,
                                     {qopt.abs_tol * std::numbers::pi / 2.0, 0.0, qopt.max_intervals},
                                     panels);
      if (!r.converged) {
        throw Error(ErrorKind::QuadratureFailure,
                    "second difference D(" + std::to_string(x) + ") did not reach tolerance");
      }
      table.d_[x] = 2.0 / std::numbers::pi * r.value;
    }
    table.a_[0] = 0.0;
    table.a_[1] = 0.5 * table.d_[0];
    for (Site x = 1; x < x_max; ++x) table.a_[x + 1] = table.d_[x] + 2.0 * table.a_[x] - table.a_[x - 1];
    return table;
  }

  // series: partial sums of sum_k [q^k(0,0) - q^k(x,0)] with the bound
  // sum_{k>=s} [...] <= (d C / q^d(0,x)) s^{-1/2}, C = max_k k^{1/2} q^k(0,0).
  Eigen::VectorXd best_ratio = Eigen::VectorXd::Constant(x_max + 1, std::numeric_limits<double>::infinity());
  best_ratio[0] = 0.0;
  double C = 0.0;
  LatticeDistribution power = LatticeDistribution::dirac(0);
  std::int64_t steps = 0;
  const std::int64_t budget = std::max<std::int64_t>(options.series_max_steps, 1);

  auto bounds_at = [&](std::int64_t s) {
    return Eigen::VectorXd(best_ratio * (C / std::sqrt(static_cast<double>(s))));
  };

  for (std::int64_t k = 0; k < budget; ++k) {
    const double at_origin = power(0);
    for (Site x = 0; x <= x_max; ++x) table.a_[x] += at_origin - power(x);
    if (k >= 1) {
      C = std::max(C, std::sqrt(static_cast<double>(k)) * at_origin);
      for (Site x = 1; x <= x_max; ++x) {
        const double px = power(x);
        if (px > 0.0) best_ratio[x] = std::min(best_ratio[x], static_cast<double>(k) / px);
      }
    }
    steps = k + 1;
    const bool checkpoint = ((steps & (steps - 1)) == 0) || steps == budget;
    if (checkpoint && steps >= 2 && std::isfinite(options.series_target) &&
        bounds_at(steps).maxCoeff() <= options.series_target) {
      break;
    }
    power = convolve(power, q.distribution());
  }

  table.series_steps_ = steps;
  table.decay_constant_ = C;
  table.tail_ = bounds_at(steps);
  if (std::isfinite(options.series_target) && table.tail_.maxCoeff() > options.series_target) {
    throw Error(ErrorKind::SeriesBudgetExceeded,
                "tail bound " + std::to_string(table.tail_.maxCoeff()) + " after " +
                    std::to_string(steps) + " terms exceeds target");
  }
  for (Site x = 0; x < x_max; ++x) {
    const double left = x == 0 ? table.a_[1] : table.a_[x - 1];
    table.d_[x] = left + table.a_[x + 1] - 2.0 * table.a_[x];
  }
  return table;
}

double cov0(const PotentialTable& table, double sigma_xi_sq, Site x) {
  return sigma_xi_sq * table.second_difference(x);
}

double spectral_density(const WeightVector& w, double sigma_xi_sq, double theta) {
  const SpectralRatio ratio(q_kernel(w));
  return sigma_xi_sq / std::numbers::pi * ratio(theta);
}

ExponentialBound fit_exponential_bound(const PotentialTable& table, double sigma_xi_sq, Site fit_max,
                                       double noise_floor) {
  fit_max = std::min(fit_max, table.x_max() - 1);
  std::vector<double> xs;
  std::vector<double> logs;
  for (Site x = 0; x <= fit_max; ++x) {
    const double v = std::abs(cov0(table, sigma_xi_sq, x));
    if (v > noise_floor) {
      xs.push_back(static_cast<double>(x));
      logs.push_back(std::log(v));
    }
  }
  ExponentialBound bound;
  bound.floor = noise_floor;
  bound.fitted_points = static_cast<int>(xs.size());
  if (xs.empty()) return bound;
  if (xs.size() == 1) {
    // a single lag above the floor: decay to the floor within one step
    bound.c = std::max(1.0, logs[0] - std::log(noise_floor));
    bound.A = std::exp(logs[0] + bound.c * xs[0]);
    return bound;
  }
  // oscillating covariances: fit the upper envelope max_{y >= x} |cov0(y)| and keep a rate margin
  for (std::size_t i = logs.size() - 1; i-- > 0;) logs[i] = std::max(logs[i], logs[i + 1]);
  const auto fit = stats::fit_line(Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())),
                                   Eigen::Map<Eigen::VectorXd>(logs.data(), static_cast<Eigen::Index>(logs.size())));
  bound.c = std::max(-0.9 * fit.slope, 1e-6);
  double logA = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) logA = std::max(logA, logs[i] + bound.c * xs[i]);
  logA += 1e-9;
  bound.A = std::exp(logA);
  return bound;
}

double increment_series_tail(const WeightVector& w, std::int64_t K) {
  const PotentialTable table = potential_kernel(w, 2, PotentialMethod::fourier);
  const WeightVector q = q_kernel(w);
  double partial = 0.0;
  LatticeDistribution power = LatticeDistribution::dirac(0);
  for (std::int64_t k = 0; k < K; ++k) {
    partial += power(0) - power(1);
    power = convolve(power, q.distribution());
  }
  return std::max(table.a(1) - partial, 0.0);
}

Pi0Sampler::Pi0Sampler(const WeightVector& w, const NoiseSpec& noise, Site first, Site last,
                       const Pi0Options& options)
    : w_(w), noise_(noise), first_(first), last_(last) {
  if (last < first) throw Error(ErrorKind::Validation, "empty sampling window");
  mode_ = options.mode.value_or(noise.family == NoiseFamily::gaussian ? Pi0Mode::gaussian_exact
                                                                        : Pi0Mode::truncated);
  if (mode_ == Pi0Mode::gaussian_exact && noise.family != NoiseFamily::gaussian) {
    throw Error(ErrorKind::SpecMismatch, "exact pi_0 sampling needs Gaussian noise");
  }
  if (mode_ == Pi0Mode::truncated) {
    if (options.truncation_K < 1) throw Error(ErrorKind::Validation, "truncation_K must be >= 1");
    K_ = options.truncation_K;
    truncation_error_ = std::sqrt(noise.variance) * std::sqrt(2.0 * increment_series_tail(w, K_));
    if (options.tolerance && truncation_error_ > *options.tolerance) {
      throw Error(ErrorKind::TruncationTooCoarse,
                  "L2 truncation error " + std::to_string(truncation_error_) + " at K = " +
                      std::to_string(K_) + " exceeds the requested tolerance");
    }
    return;
  }

  const Eigen::Index n = last - first + 1;
  if (n > 4096) throw Error(ErrorKind::WindowTooLarge, "exact pi_0 sampling is limited to 4096 sites");
  const PotentialTable table = potential_kernel(w, std::max<Site>(n, 2), PotentialMethod::fourier);
  cov_row_.resize(n);
  for (Eigen::Index x = 0; x < n; ++x) cov_row_[x] = cov0(table, noise.variance, x);
  if (noise.variance == 0.0) return;

  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cov(i, j) = cov_row_[std::abs(i - j)];
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::QuadratureFailure, "pi_0 covariance is not numerically positive definite");
  }
  factor_ = llt.matrixL();
  const double negligible = 1e-20 * factor_(0, 0);
  band_start_.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    while (j < i && std::abs(factor_(i, j)) <= negligible) ++j;
    band_start_[static_cast<std::size_t>(i)] = j;
  }
}

Pi0Sample Pi0Sampler::sample(std::uint64_t seed) const {
  Pi0Sample out;
  out.mode = mode_;
  out.truncation_error = truncation_error_;
  const Eigen::Index n = last_ - first_ + 1;

  if (mode_ == Pi0Mode::truncated) {
    HarnessStepper stepper(w_);
    const auto [lo, hi] = stepper.window_before(first_ - 1, last_, K_);
    const FieldWindow flat = FieldWindow::constant(lo, hi, 0.0);
    const FieldWindow h = evolve(flat, w_, NoiseRealization(seed, noise_), K_, first_ - 1, last_, -K_);
    out.field = h.differences();
    return out;
  }

  out.field = FieldWindow::constant(first_, last_, 0.0);
  if (noise_.variance == 0.0) return out;
  const UnitStream unit(seed, NoiseFamily::gaussian);
  std::vector<double> z(static_cast<std::size_t>(n));
  unit.fill(0, 0, z);
  const Eigen::Map<const Eigen::VectorXd> zv(z.data(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j0 = band_start_[static_cast<std::size_t>(i)];
    out.field.values[i] = factor_.row(i).segment(j0, i - j0 + 1).dot(zv.segment(j0, i - j0 + 1));
  }
  return out;
}

Pi0Sample sample_pi0(const WeightVector& w, const NoiseSpec& noise, Site first, Site last,
                     const Pi0Options& options, std::uint64_t seed) {
  return Pi0Sampler(w, noise, first, last, options).sample(seed);
}

}  // namespace harness
