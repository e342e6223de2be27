#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace harness {

/// Philox4x32-10 (Salmon et al., Random123): a keyed bijection on 128-bit
/// counters. Used so that every noise value is a pure function of
/// (seed, time, site) and can be regenerated in any order.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t key)
      : k0_(static_cast<std::uint32_t>(key)), k1_(static_cast<std::uint32_t>(key >> 32)) {}

  Block operator()(std::uint64_t c_lo, std::uint64_t c_hi) const {
    Block c = {static_cast<std::uint32_t>(c_lo), static_cast<std::uint32_t>(c_lo >> 32),
               static_cast<std::uint32_t>(c_hi), static_cast<std::uint32_t>(c_hi >> 32)};
    std::uint32_t k0 = k0_;
    std::uint32_t k1 = k1_;
    for (int r = 0; r < 10; ++r) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
      c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0, static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1, static_cast<std::uint32_t>(p0)};
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return c;
  }

 private:
  std::uint32_t k0_;
  std::uint32_t k1_;
};

/// SplitMix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ull));
}

enum class NoiseFamily { gaussian, centered_uniform, centered_two_point };

std::string_view to_string(NoiseFamily f);
NoiseFamily parse_noise_family(std::string_view name);

struct NoiseSpec {
  NoiseFamily family = NoiseFamily::gaussian;
  double variance = 1.0;  // sigma_xi^2
};

/// Standard (mean 0, variance 1) values indexed by (row, column), four per
/// Philox block. Rows are time indices, columns sites; negative indices are
/// fine.
class UnitStream {
 public:
  UnitStream(std::uint64_t seed, NoiseFamily family) : gen_(seed), family_(family) {}

  double operator()(std::int64_t row, std::int64_t col) const;

  /// out[j] = value(row, first + j)
  void fill(std::int64_t row, std::int64_t first, std::span<double> out) const;

  NoiseFamily family() const { return family_; }

 private:
  void block(std::int64_t row, std::int64_t block_index, double* out4) const;

  Philox4x32 gen_;
  NoiseFamily family_;
};

/// The i.i.d. noise field xi_t(i): mean 0, variance sigma_xi^2, identical on
/// every access for a fixed seed.
class NoiseRealization {
 public:
  NoiseRealization(std::uint64_t seed, NoiseSpec spec)
      : seed_(seed), spec_(spec), unit_(seed, spec.family), scale_(std::sqrt(spec.variance)) {}

  double operator()(std::int64_t t, std::int64_t i) const { return scale_ * unit_(t, i); }

  /// out[j] = xi_t(first + j)
  void fill_row(std::int64_t t, std::int64_t first, std::span<double> out) const {
    if (scale_ == 0.0) {
      for (double& v : out) v = 0.0;
      return;
    }
    unit_.fill(t, first, out);
    if (scale_ != 1.0)
      for (double& v : out) v *= scale_;
  }

  std::uint64_t seed() const { return seed_; }
  const NoiseSpec& spec() const { return spec_; }
  bool silent() const { return scale_ == 0.0; }

 private:
  std::uint64_t seed_;
  NoiseSpec spec_;
  UnitStream unit_;
  double scale_;
};

}  // namespace harness
