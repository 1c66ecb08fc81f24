#pragma once

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>

namespace magbill::detail {

/// Root of `f` on [lo, hi] given f(lo), f(hi) of opposite sign (or zero).
/// TOMS 748 to full double precision.
template <class F>
double bracketed_root(F&& f, double lo, double hi, double flo, double fhi) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (a + b);
}

template <class F>
double bracketed_root(F&& f, double lo, double hi) {
  return bracketed_root(f, lo, hi, f(lo), f(hi));
}

/// Plain bisection to an absolute parameter tolerance.
template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Brent minimization on [lo, hi]; returns (argmin, min).
template <class F>
std::pair<double, double> minimize(F&& f, double lo, double hi) {
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits, iters);
  return {r.first, r.second};
}

}  // namespace magbill::detail
