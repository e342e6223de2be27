#pragma once

#include <map>
#include <random>

#include "harness/error.hpp"
#include "harness/lattice_kernel.hpp"

namespace harness::testing {

/// A random valid weight vector with support inside [lo, hi].
inline WeightVector random_weights(std::mt19937_64& rng, Site lo = -3, Site hi = 3, int max_points = 5) {
  std::uniform_int_distribution<int> count(2, max_points);
  std::uniform_int_distribution<Site> site(lo, hi);
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  while (true) {
    std::map<Site, double> raw;
    const int k = count(rng);
    for (int j = 0; j < k; ++j) raw[site(rng)] = mass(rng);
    double total = 0.0;
    for (auto& [x, p] : raw) total += p;
    for (auto& [x, p] : raw) p /= total;
    try {
      return validate_weights(raw);
    } catch (const Error&) {
    }
  }
}

template <class F>
ErrorKind thrown_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  throw std::logic_error("expected a harness::Error");
}

}  // namespace harness::testing
