#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "harness/lattice_kernel.hpp"

namespace harness {

/// A finite window of a real field on the integers. Every stored value is
/// exact: dynamics trim the window to the sites whose dependency cone lies
/// inside the previous window instead of inventing boundary values.
struct FieldWindow {
  Site offset = 0;
  Eigen::VectorXd values;

  FieldWindow() = default;
  FieldWindow(Site first, Eigen::VectorXd v) : offset(first), values(std::move(v)) {}

  static FieldWindow constant(Site first, Site last, double c) {
    return {first, Eigen::VectorXd::Constant(last - first + 1, c)};
  }

  Site first() const { return offset; }
  Site last() const { return offset + static_cast<Site>(values.size()) - 1; }
  Eigen::Index size() const { return values.size(); }
  bool contains(Site i) const { return i >= first() && i <= last(); }
  bool covers(Site lo, Site hi) const { return lo >= first() && hi <= last(); }

  double operator()(Site i) const { return values[i - offset]; }
  double& operator()(Site i) { return values[i - offset]; }

  /// Values on [lo, hi]; throws WindowTooSmall if not covered.
  FieldWindow crop(Site lo, Site hi) const;

  /// eta(i) = h(i) - h(i-1) on [first+1, last]
  FieldWindow differences() const;
};

/// Heights from increments anchored at h(0) = 0: h(i) = sum_{0<j<=i} eta(j)
/// for i > 0 and h(i) = -sum_{i<j<=0} eta(j) for i < 0. `eta` must cover
/// [min(lo,0)+1, max(hi,0)]; result covers [lo, hi].
FieldWindow heights_from_increments(const FieldWindow& eta, Site lo, Site hi);

/// CSV "site,value" with an optional leading comment block.
void write_field_csv(std::ostream& os, const FieldWindow& f, const std::string& header_comment = {});

}  // namespace harness
