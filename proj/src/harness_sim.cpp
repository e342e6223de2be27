#include "harness/harness_sim.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "harness/error.hpp"
#include "harness/parallel.hpp"
#include "harness/stats.hpp"

namespace harness {

HarnessStepper::HarnessStepper(const WeightVector& w) : kmin_(w.min_offset()), kmax_(w.max_offset()) {
  for (Site k = kmin_; k <= kmax_; ++k) {
    if (w(k) > 0.0) taps_.emplace_back(static_cast<Eigen::Index>(k - kmin_), w(k));
  }
}

void HarnessStepper::average(const FieldWindow& in, Eigen::VectorXd& out) const {
  const Eigen::Index m = in.size() - static_cast<Eigen::Index>(kmax_ - kmin_);
  if (m < 1) throw Error(ErrorKind::WindowTooSmall, "no exact site survives the step");
  out.resize(m);
  auto it = taps_.begin();
  out.noalias() = it->second * in.values.segment(it->first, m);
  for (++it; it != taps_.end(); ++it) out.noalias() += it->second * in.values.segment(it->first, m);
}

void HarnessStepper::step_heights(FieldWindow& h, const NoiseRealization& noise, std::int64_t t_next) {
  average(h, scratch_);
  const Site first = h.first() - kmin_;
  const Eigen::Index m = scratch_.size();
  if (!noise.silent()) {
    row_.resize(static_cast<std::size_t>(m));
    noise.fill_row(t_next, first, row_);
    scratch_ += Eigen::Map<const Eigen::VectorXd>(row_.data(), m);
  }
  h.offset = first;
  h.values.swap(scratch_);
}

void HarnessStepper::step_increments(FieldWindow& eta, const NoiseRealization& noise,
                                     std::int64_t t_next) {
  average(eta, scratch_);
  const Site first = eta.first() - kmin_;
  const Eigen::Index m = scratch_.size();
  if (!noise.silent()) {
    row_.resize(static_cast<std::size_t>(m + 1));
    noise.fill_row(t_next, first - 1, row_);
    Eigen::Map<const Eigen::VectorXd> xi(row_.data(), m + 1);
    scratch_ += xi.tail(m) - xi.head(m);
  }
  eta.offset = first;
  eta.values.swap(scratch_);
}

FieldWindow evolve(const FieldWindow& h0, const WeightVector& w, const NoiseRealization& noise,
                   std::int64_t T, std::int64_t t0) {
  if (T < 0) throw Error(ErrorKind::Validation, "step count must be nonnegative");
  HarnessStepper stepper(w);
  const auto [lo, hi] = stepper.window_after(h0.first(), h0.last(), T);
  if (hi < lo) {
    throw Error(ErrorKind::WindowTooSmall,
                "initial window of " + std::to_string(h0.size()) + " sites is exhausted before step " +
                    std::to_string(T));
  }
  FieldWindow h = h0;
  for (std::int64_t t = 0; t < T; ++t) stepper.step_heights(h, noise, t0 + t + 1);
  return h;
}

FieldWindow evolve(const FieldWindow& h0, const WeightVector& w, const NoiseRealization& noise,
                   std::int64_t T, Site report_first, Site report_last, std::int64_t t0) {
  HarnessStepper stepper(w);
  const auto [lo, hi] = stepper.window_after(h0.first(), h0.last(), T);
  if (report_first < lo || report_last > hi) {
    throw Error(ErrorKind::WindowTooSmall,
                "exactness after " + std::to_string(T) + " steps covers [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "], requested [" + std::to_string(report_first) + ", " +
                    std::to_string(report_last) + "]");
  }
  return evolve(h0, w, noise, T, t0).crop(report_first, report_last);
}

FieldWindow increment_evolve(const FieldWindow& eta0, const WeightVector& w,
                             const NoiseRealization& noise, std::int64_t T, std::int64_t t0) {
  if (T < 0) throw Error(ErrorKind::Validation, "step count must be nonnegative");
  HarnessStepper stepper(w);
  const auto [lo, hi] = stepper.window_after(eta0.first(), eta0.last(), T);
  if (hi < lo) throw Error(ErrorKind::WindowTooSmall, "increment window exhausted");
  FieldWindow eta = eta0;
  for (std::int64_t t = 0; t < T; ++t) stepper.step_increments(eta, noise, t0 + t + 1);
  return eta;
}

double dual_representation(const FieldWindow& h0, const WeightVector& w, const NoiseRealization& noise,
                           std::int64_t T, Site site, std::int64_t t0) {
  if (T < 0) throw Error(ErrorKind::Validation, "step count must be nonnegative");
  const Site need_lo = site + T * w.min_offset();
  const Site need_hi = site + T * w.max_offset();
  if (!h0.covers(need_lo, need_hi)) {
    throw Error(ErrorKind::WindowTooSmall, "initial heights do not cover the support of p^T(site, .)");
  }

  // powers[m] = p^m(0, .), m = 0 .. T
  std::vector<LatticeDistribution> powers;
  powers.reserve(static_cast<std::size_t>(T + 1));
  powers.push_back(LatticeDistribution::dirac(0));
  for (std::int64_t m = 1; m <= T; ++m) powers.push_back(convolve(powers.back(), w.distribution()));

  const LatticeDistribution& pT = powers[static_cast<std::size_t>(T)];
  double value = 0.0;
  for (Eigen::Index j = 0; j < pT.size(); ++j) value += pT.masses[j] * h0(site + pT.offset + j);

  if (!noise.silent()) {
    std::vector<double> row;
    for (std::int64_t k = 1; k <= T; ++k) {
      const LatticeDistribution& p = powers[static_cast<std::size_t>(T - k)];
      row.resize(static_cast<std::size_t>(p.size()));
      noise.fill_row(t0 + k, site + p.offset, row);
      for (Eigen::Index j = 0; j < p.size(); ++j) value += p.masses[j] * row[static_cast<std::size_t>(j)];
    }
  }
  return value;
}

double hydrodynamic_profile_error(const Profile& u, const WeightVector& w, const NoiseSpec& noise,
                                  std::int64_t n, double t, double R, std::uint64_t seed) {
  if (n < 1 || t < 0.0 || R < 0.0) throw Error(ErrorKind::Validation, "need n >= 1, t >= 0, R >= 0");
  const auto T = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * t));
  const auto J = static_cast<Site>(std::floor(R * static_cast<double>(n)));
  HarnessStepper stepper(w);
  const auto [lo, hi] = stepper.window_before(-J, J, T);

  FieldWindow h0 = FieldWindow::constant(lo, hi, 0.0);
  const double nd = static_cast<double>(n);
  for (Site i = lo; i <= hi; ++i) h0(i) = nd * u(static_cast<double>(i) / nd);

  const FieldWindow hT = evolve(h0, w, NoiseRealization(seed, noise), T, -J, J);
  const double b = w.speed();
  double worst = 0.0;
  for (Site j = -J; j <= J; ++j) {
    const double x = static_cast<double>(j) / nd;
    worst = std::max(worst, std::abs(hT(j) / nd - u(x - b * t)));
  }
  return worst;
}

std::vector<CouplingPoint> coupling_decay(const FieldGenerator& first_law,
                                          const FieldGenerator& second_law, const WeightVector& w,
                                          const NoiseSpec& noise, const std::vector<std::int64_t>& T_list,
                                          std::size_t replicas, std::uint64_t seed, unsigned workers) {
  if (T_list.empty()) throw Error(ErrorKind::Validation, "T_list is empty");
  if (replicas == 0) throw Error(ErrorKind::Validation, "need at least one replica");
  std::vector<std::int64_t> times = T_list;
  std::sort(times.begin(), times.end());
  if (times.front() < 0) throw Error(ErrorKind::Validation, "negative time in T_list");
  const std::int64_t T_max = times.back();

  HarnessStepper probe(w);
  const auto [lo, hi] = probe.window_before(0, 0, T_max);

  const std::size_t nt = times.size();
  std::vector<double> gaps(replicas * nt);
  for_each_replica(replicas, workers, [&](std::size_t r) {
    const std::uint64_t rs = derive_seed(seed, r);
    FieldWindow a = first_law(lo, hi, derive_seed(rs, 1));
    FieldWindow b = second_law(lo, hi, derive_seed(rs, 2));
    const NoiseRealization xi(derive_seed(rs, 0), noise);
    HarnessStepper stepper(w);
    std::int64_t t = 0;
    for (std::size_t k = 0; k < nt; ++k) {
      for (; t < times[k]; ++t) {
        stepper.step_increments(a, xi, t + 1);
        stepper.step_increments(b, xi, t + 1);
      }
      gaps[r * nt + k] = std::abs(a(0) - b(0));
    }
  });

  std::vector<CouplingPoint> out;
  std::vector<double> column(replicas);
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t r = 0; r < replicas; ++r) column[r] = gaps[r * nt + k];
    const auto est = stats::mean_estimate(column);
    out.push_back({times[k], est.value, est.std_error});
  }
  return out;
}

FieldGenerator iid_field(NoiseFamily family, double variance, double mean) {
  return [family, variance, mean](Site first, Site last, std::uint64_t seed) {
    FieldWindow f = FieldWindow::constant(first, last, 0.0);
    const NoiseRealization draw(seed, NoiseSpec{family, variance});
    std::vector<double> row(static_cast<std::size_t>(f.size()));
    draw.fill_row(0, first, row);
    for (Eigen::Index j = 0; j < f.size(); ++j) f.values[j] = mean + row[static_cast<std::size_t>(j)];
    return f;
  };
}

}  // namespace harness
