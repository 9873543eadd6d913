#pragma once

#include <cmath>
#include <utility>

namespace lassonse::search {

struct ScalarMinimum {
  double x;
  double value;
};

/// Golden-section search for the minimum of a unimodal f on [lo, hi],
/// stopping once the bracket is narrower than `tol`.
template <class F>
ScalarMinimum golden_section_min(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    // floating point has stalled the bracket
    if (!(c < d)) break;
  }
  return fc <= fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
}

template <class F>
ScalarMinimum golden_section_max(F&& f, double lo, double hi, double tol) {
  auto r = golden_section_min([&](double x) { return -f(x); }, lo, hi, tol);
  return {r.x, -r.value};
}

/// Given pred(lo) == true and pred(hi) == false, shrinks [lo, hi] around the
/// switch point until hi - lo <= abs_tol + rel_tol * |hi|. Returns the final
/// bracket (lo keeps pred true, hi keeps pred false).
template <class Pred>
std::pair<double, double> bisect(Pred&& pred, double lo, double hi,
                                 double abs_tol, double rel_tol = 0.0) {
  while (std::abs(hi - lo) > abs_tol + rel_tol * std::abs(hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

}  // namespace lassonse::search
