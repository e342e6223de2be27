#include "harness/noise.hpp"

#include <numbers>

#include "harness/error.hpp"

namespace harness {

std::string_view to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::gaussian: return "gaussian";
    case NoiseFamily::centered_uniform: return "centered-uniform";
    case NoiseFamily::centered_two_point: return "centered-two-point";
  }
  return "unknown";
}

NoiseFamily parse_noise_family(std::string_view name) {
  if (name == "gaussian") return NoiseFamily::gaussian;
  if (name == "centered-uniform" || name == "uniform") return NoiseFamily::centered_uniform;
  if (name == "centered-two-point" || name == "two-point") return NoiseFamily::centered_two_point;
  throw Error(ErrorKind::Validation, "unknown noise family '" + std::string(name) + "'");
}

namespace {

// 53-bit uniform in (0, 1)
inline double open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

inline std::int64_t floor_div2(std::int64_t v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

}  // namespace

// Each Philox block yields two values: a Box-Muller pair for the Gaussian
// family, two 53-bit uniforms otherwise.
void UnitStream::block(std::int64_t row, std::int64_t block_index, double* out) const {
  const auto r = gen_(static_cast<std::uint64_t>(row), static_cast<std::uint64_t>(block_index));
  switch (family_) {
    case NoiseFamily::gaussian: {
      const double radius = std::sqrt(-2.0 * std::log(open_unit(r[0], r[1])));
      const double angle = 2.0 * std::numbers::pi * open_unit(r[2], r[3]);
      out[0] = radius * std::cos(angle);
      out[1] = radius * std::sin(angle);
      break;
    }
    case NoiseFamily::centered_uniform: {
      constexpr double half_width = std::numbers::sqrt3;
      out[0] = half_width * (2.0 * open_unit(r[0], r[1]) - 1.0);
      out[1] = half_width * (2.0 * open_unit(r[2], r[3]) - 1.0);
      break;
    }
    case NoiseFamily::centered_two_point: {
      out[0] = (r[0] & 1u) ? 1.0 : -1.0;
      out[1] = (r[2] & 1u) ? 1.0 : -1.0;
      break;
    }
  }
}

double UnitStream::operator()(std::int64_t row, std::int64_t col) const {
  double pair[2];
  const std::int64_t b = floor_div2(col);
  block(row, b, pair);
  return pair[col - 2 * b];
}

void UnitStream::fill(std::int64_t row, std::int64_t first, std::span<double> out) const {
  const std::int64_t n = static_cast<std::int64_t>(out.size());
  if (n == 0) return;
  double pair[2];
  std::int64_t j = 0;
  std::int64_t b = floor_div2(first);
  if (first - 2 * b == 1) {
    block(row, b, pair);
    out[0] = pair[1];
    j = 1;
    ++b;
  }
  for (; j + 1 < n; j += 2, ++b) block(row, b, &out[static_cast<std::size_t>(j)]);
  if (j < n) {
    block(row, b, pair);
    out[static_cast<std::size_t>(j)] = pair[0];
  }
}

}  // namespace harness
