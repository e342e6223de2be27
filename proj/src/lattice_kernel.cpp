#include "harness/lattice_kernel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "harness/error.hpp"

namespace harness {

LatticeDistribution LatticeDistribution::dirac(Site at) {
  LatticeDistribution d;
  d.offset = at;
  d.masses = Eigen::VectorXd::Ones(1);
  return d;
}

double LatticeDistribution::mean() const {
  double m = 0.0;
  for (Eigen::Index k = 0; k < masses.size(); ++k) m += static_cast<double>(offset + k) * masses[k];
  return m / total();
}

double LatticeDistribution::variance() const {
  const double m = mean();
  double v = 0.0;
  for (Eigen::Index k = 0; k < masses.size(); ++k) {
    const double d = static_cast<double>(offset + k) - m;
    v += d * d * masses[k];
  }
  return v / total();
}

LatticeDistribution LatticeDistribution::reflected() const {
  LatticeDistribution r;
  r.offset = -last();
  r.masses = masses.reverse();
  return r;
}

LatticeDistribution LatticeDistribution::shifted(Site by) const {
  LatticeDistribution r = *this;
  r.offset += by;
  return r;
}

void LatticeDistribution::trim(double floor) {
  Eigen::Index lo = 0;
  Eigen::Index hi = masses.size();
  while (lo < hi && std::abs(masses[lo]) <= floor) ++lo;
  while (hi > lo && std::abs(masses[hi - 1]) <= floor) --hi;
  if (lo == 0 && hi == masses.size()) return;
  Eigen::VectorXd kept = masses.segment(lo, hi - lo);
  masses = std::move(kept);
  offset += lo;
}

Site WeightVector::reach() const {
  return std::max(std::abs(min_offset()), std::abs(max_offset()));
}

std::string WeightVector::to_string() const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (Site k = dist_.first(); k <= dist_.last(); ++k) {
    if (dist_(k) <= 0.0) continue;
    if (!first) os << ',';
    os << k << ':' << dist_(k);
    first = false;
  }
  return os.str();
}

std::int64_t support_span(const LatticeDistribution& d) {
  std::int64_t g = 0;
  Site anchor = 0;
  bool have_anchor = false;
  for (Site k = d.first(); k <= d.last(); ++k) {
    if (d(k) <= 0.0) continue;
    if (!have_anchor) {
      anchor = k;
      have_anchor = true;
      continue;
    }
    g = std::gcd(g, k - anchor);
  }
  return g;
}

namespace {

constexpr double kMassTolerance = 1e-12;

void derive_moments(const LatticeDistribution& d, double& mean, double& variance) {
  mean = 0.0;
  for (Site k = d.first(); k <= d.last(); ++k) mean += static_cast<double>(k) * d(k);
  variance = 0.0;
  for (Site k = d.first(); k <= d.last(); ++k) {
    const double c = static_cast<double>(k) - mean;
    variance += c * c * d(k);
  }
}

}  // namespace

WeightVector validate_weights(const std::map<Site, double>& raw) {
  if (raw.empty()) throw Error(ErrorKind::DegenerateSupport, "weight map is empty");

  double total = 0.0;
  Site lo = 0;
  Site hi = 0;
  bool any = false;
  for (const auto& [k, p] : raw) {
    if (!(p >= 0.0)) {
      throw Error(ErrorKind::NegativeWeight,
                  "w(" + std::to_string(k) + ") must satisfy 0 <= w(k) < 1");
    }
  }
  for (const auto& [k, p] : raw) {
    if (p >= 1.0 && raw.size() == 1) {
      throw Error(ErrorKind::DegenerateSupport, "single-point support has zero variance");
    }
    if (p >= 1.0) {
      throw Error(ErrorKind::DegenerateSupport,
                  "w(" + std::to_string(k) + ") >= 1 leaves no room for other mass");
    }
    total += p;
    if (p > 0.0) {
      if (!any) lo = hi = k;
      lo = std::min(lo, k);
      hi = std::max(hi, k);
      any = true;
    }
  }
  if (!any) throw Error(ErrorKind::DegenerateSupport, "weight support is empty");
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "weights sum to " << total << ", expected 1 within 1e-12";
    throw Error(ErrorKind::MassNotOne, os.str());
  }

  WeightVector w;
  w.dist_.offset = lo;
  w.dist_.masses = Eigen::VectorXd::Zero(hi - lo + 1);
  for (const auto& [k, p] : raw) {
    if (p > 0.0) w.dist_.masses[k - lo] = p;
  }
  derive_moments(w.dist_, w.mean_, w.variance_);
  if (lo == hi || !(w.variance_ > 0.0)) {
    throw Error(ErrorKind::DegenerateSupport, "weight vector has zero variance");
  }
  w.span_ = support_span(w.dist_);
  if (w.span_ != 1) {
    throw Error(ErrorKind::SpanNotOne,
                "support lies on a lattice of span " + std::to_string(w.span_) + ", need span 1");
  }
  return w;
}

std::map<Site, double> parse_weight_map(std::string_view text) {
  // normalize U+2212 (e2 88 92) to '-'
  std::string s;
  s.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xe2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x88 &&
        static_cast<unsigned char>(text[i + 2]) == 0x92) {
      s.push_back('-');
      i += 2;
    } else if (!std::isspace(static_cast<unsigned char>(text[i]))) {
      s.push_back(text[i]);
    }
  }

  std::map<Site, double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    const std::string item = s.substr(pos, comma - pos);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == item.size()) {
      throw Error(ErrorKind::ConfigParse, "weight entry '" + item + "' is not offset:prob");
    }
    try {
      std::size_t used = 0;
      const std::string key = item.substr(0, colon);
      const long long k = std::stoll(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
      const std::string val = item.substr(colon + 1);
      const double p = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
      if (out.count(k) != 0) {
        throw Error(ErrorKind::ConfigParse, "duplicate weight offset " + key);
      }
      out[k] = p;
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ConfigParse, "cannot parse weight entry '" + item + "'");
    }
    pos = comma + 1;
  }
  if (out.empty()) throw Error(ErrorKind::ConfigParse, "empty weight map");
  return out;
}

namespace {

LatticeDistribution convolve_direct(const LatticeDistribution& a, const LatticeDistribution& b) {
  // the shorter operand drives the inner loop; ascending offsets throughout
  const LatticeDistribution& big = a.size() >= b.size() ? a : b;
  const LatticeDistribution& small = a.size() >= b.size() ? b : a;
  LatticeDistribution out;
  out.offset = a.offset + b.offset;
  out.masses = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
  for (Eigen::Index j = 0; j < small.size(); ++j) {
    const double s = small.masses[j];
    if (s == 0.0) continue;
    out.masses.segment(j, big.size()) += s * big.masses;
  }
  return out;
}

LatticeDistribution convolve_fft(const LatticeDistribution& a, const LatticeDistribution& b) {
  const Eigen::Index n = a.size() + b.size() - 1;
  Eigen::Index m = 1;
  while (m < n) m <<= 1;

  std::vector<double> fa(static_cast<std::size_t>(m), 0.0);
  std::vector<double> fb(static_cast<std::size_t>(m), 0.0);
  std::copy(a.masses.data(), a.masses.data() + a.size(), fa.begin());
  std::copy(b.masses.data(), b.masses.data() + b.size(), fb.begin());

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> ca;
  std::vector<std::complex<double>> cb;
  fft.fwd(ca, fa);
  fft.fwd(cb, fb);
  for (std::size_t i = 0; i < ca.size(); ++i) ca[i] *= cb[i];
  std::vector<double> prod;
  fft.inv(prod, ca);

  LatticeDistribution out;
  out.offset = a.offset + b.offset;
  out.masses.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.masses[i] = std::max(prod[static_cast<std::size_t>(i)], 0.0);

  const double expected = a.total() * b.total();
  const double got = out.masses.sum();
  if (std::abs(got - expected) > 1e-10 * std::max(1.0, expected)) {
    throw Error(ErrorKind::BudgetExceeded, "FFT convolution lost mass beyond 1e-10");
  }
  if (got > 0.0) out.masses *= expected / got;
  out.trim(1e-300);
  return out;
}

}  // namespace

LatticeDistribution convolve(const LatticeDistribution& a, const LatticeDistribution& b) {
  if (a.empty() || b.empty()) return {};
  if (std::min(a.size(), b.size()) < kFftThreshold) return convolve_direct(a, b);
  return convolve_fft(a, b);
}

LatticeDistribution transition_power(const LatticeDistribution& step, std::int64_t k,
                                     std::int64_t max_width) {
  if (k < 0) throw Error(ErrorKind::Validation, "transition power must be nonnegative");
  const std::int64_t width = step.last() - step.first();
  if (width > 0 && k > (max_width - 1) / width) {
    throw Error(ErrorKind::WindowTooLarge,
                "support width of power " + std::to_string(k) + " exceeds " + std::to_string(max_width));
  }
  LatticeDistribution result = LatticeDistribution::dirac(0);
  LatticeDistribution base = step;
  std::int64_t e = k;
  while (e > 0) {
    if (e & 1) result = convolve(result, base);
    e >>= 1;
    if (e > 0) base = convolve(base, base);
  }
  return result;
}

LatticeDistribution transition_power(const WeightVector& w, std::int64_t k, std::int64_t max_width) {
  return transition_power(w.distribution(), k, max_width);
}

WeightVector q_kernel(const WeightVector& w) {
  const LatticeDistribution& d = w.distribution();
  const Site width = d.last() - d.first();
  WeightVector q;
  q.dist_.offset = -width;
  q.dist_.masses = Eigen::VectorXd::Zero(2 * width + 1);
  for (Site x = 0; x <= width; ++x) {
    double s = 0.0;
    for (Site z = d.first(); z + x <= d.last(); ++z) s += d(z) * d(z + x);
    q.dist_.masses[width + x] = s;
    q.dist_.masses[width - x] = s;
  }
  q.dist_.trim(0.0);
  derive_moments(q.dist_, q.mean_, q.variance_);
  q.mean_ = 0.0;  // exact by symmetry
  q.span_ = support_span(q.dist_);
  return q;
}

std::complex<double> char_function(const LatticeDistribution& d, double theta) {
  std::complex<double> s{0.0, 0.0};
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    const double x = static_cast<double>(d.offset + k);
    s += d.masses[k] * std::complex<double>(std::cos(theta * x), std::sin(theta * x));
  }
  return s;
}

std::complex<double> centered_char_function(const LatticeDistribution& d, double theta) {
  const double m = d.mean();
  std::complex<double> s{0.0, 0.0};
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    const double x = static_cast<double>(d.offset + k) - m;
    s += d.masses[k] * std::complex<double>(std::cos(theta * x), std::sin(theta * x));
  }
  return s;
}

}  // namespace harness
