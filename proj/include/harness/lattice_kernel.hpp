#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace harness {

using Site = std::int64_t;

/// Finite-support mass function on the integers, stored densely from
/// `offset` to `offset + masses.size() - 1`.
struct LatticeDistribution {
  Site offset = 0;
  Eigen::VectorXd masses;

  static LatticeDistribution dirac(Site at = 0);

  Site first() const { return offset; }
  Site last() const { return offset + static_cast<Site>(masses.size()) - 1; }
  Eigen::Index size() const { return masses.size(); }
  bool empty() const { return masses.size() == 0; }

  /// Mass at `x`, zero outside the stored range.
  double operator()(Site x) const {
    const Site k = x - offset;
    return (k < 0 || k >= static_cast<Site>(masses.size())) ? 0.0 : masses[k];
  }

  double total() const { return masses.sum(); }
  double mean() const;
  double variance() const;

  /// The law of -X.
  LatticeDistribution reflected() const;
  /// The law of X + by.
  LatticeDistribution shifted(Site by) const;

  /// Drops leading/trailing entries whose magnitude is at or below `floor`.
  void trim(double floor = 0.0);
};

/// Validated step law of the averaging rule: finite support, unit mass,
/// positive variance and span one. Only constructible through
/// validate_weights (or derived kernels such as q_kernel).
class WeightVector {
 public:
  const LatticeDistribution& distribution() const { return dist_; }
  double operator()(Site k) const { return dist_(k); }

  Site min_offset() const { return dist_.first(); }
  Site max_offset() const { return dist_.last(); }
  /// max(|min supp|, |max supp|)
  Site reach() const;

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  std::int64_t span() const { return span_; }

  /// Characteristic speed b = -mean.
  double speed() const { return -mean_; }

  std::string to_string() const;

 private:
  friend WeightVector validate_weights(const std::map<Site, double>& raw);
  friend WeightVector q_kernel(const WeightVector& w);

  LatticeDistribution dist_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  std::int64_t span_ = 1;
};

/// Checks the averaging-rule assumptions and derives mean, variance and span.
/// Throws Error with NegativeWeight, MassNotOne, DegenerateSupport or SpanNotOne.
WeightVector validate_weights(const std::map<Site, double>& raw);

/// Parses "offset:prob,offset:prob,..." (ASCII '-' or U+2212 minus accepted).
std::map<Site, double> parse_weight_map(std::string_view text);

/// gcd of {k - k0 : k in support}; 0 for a single-point support.
std::int64_t support_span(const LatticeDistribution& d);

/// Linear convolution. Uses the direct O(nm) sum when the smaller operand is
/// narrower than kFftThreshold, otherwise FFT with clamping of negative
/// round-off, trimming below 1e-300 and a mass-conservation check.
LatticeDistribution convolve(const LatticeDistribution& a, const LatticeDistribution& b);

inline constexpr Eigen::Index kFftThreshold = 512;

/// p^k(0, .) by binary powering. Throws WindowTooLarge when the support width
/// k * (max - min) + 1 would exceed `max_width`.
LatticeDistribution transition_power(const WeightVector& w, std::int64_t k,
                                     std::int64_t max_width = std::int64_t{1} << 26);
LatticeDistribution transition_power(const LatticeDistribution& step, std::int64_t k,
                                     std::int64_t max_width = std::int64_t{1} << 26);

/// q(x) = sum_z w(z) w(x + z): the step law of the difference of two
/// independent w-walks. Symmetric by construction.
WeightVector q_kernel(const WeightVector& w);

/// phi(theta) = sum_x d(x) e^{i theta x}
std::complex<double> char_function(const LatticeDistribution& d, double theta);
/// e^{-i theta mean} phi(theta)
std::complex<double> centered_char_function(const LatticeDistribution& d, double theta);

}  // namespace harness
