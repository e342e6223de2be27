#include "harness/field.hpp"

#include <algorithm>
#include <ostream>

#include "harness/error.hpp"

namespace harness {

FieldWindow FieldWindow::crop(Site lo, Site hi) const {
  if (!covers(lo, hi)) {
    throw Error(ErrorKind::WindowTooSmall, "exact window [" + std::to_string(first()) + ", " +
                                               std::to_string(last()) + "] does not cover [" +
                                               std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return {lo, values.segment(lo - offset, hi - lo + 1)};
}

FieldWindow FieldWindow::differences() const {
  if (size() < 2) throw Error(ErrorKind::WindowTooSmall, "need two sites to difference");
  const Eigen::Index m = size() - 1;
  return {first() + 1, values.tail(m) - values.head(m)};
}

FieldWindow heights_from_increments(const FieldWindow& eta, Site lo, Site hi) {
  const Site need_lo = std::min<Site>(lo, 0) + 1;
  const Site need_hi = std::max<Site>(hi, 0);
  if (need_lo <= need_hi && !eta.covers(need_lo, need_hi)) {
    throw Error(ErrorKind::WindowTooSmall, "increments do not cover the anchoring path to site 0");
  }
  FieldWindow h = FieldWindow::constant(lo, hi, 0.0);
  double acc = 0.0;
  for (Site i = 1; i <= hi; ++i) {
    acc += eta(i);
    if (i >= lo) h(i) = acc;
  }
  acc = 0.0;
  for (Site i = 0; i >= lo; --i) {
    if (i <= hi) h(i) = -acc;
    if (i > lo) acc += eta(i);
  }
  return h;
}

void write_field_csv(std::ostream& os, const FieldWindow& f, const std::string& header_comment) {
  if (!header_comment.empty()) {
    std::size_t pos = 0;
    while (pos < header_comment.size()) {
      const std::size_t nl = std::min(header_comment.find('\n', pos), header_comment.size());
      os << "# " << header_comment.substr(pos, nl - pos) << '\n';
      pos = nl + 1;
    }
  }
  os << "site,value\n";
  os.precision(17);
  for (Site i = f.first(); i <= f.last(); ++i) os << i << ',' << f(i) << '\n';
}

}  // namespace harness
