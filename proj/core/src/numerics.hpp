#pragma once

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "grushin/errors.hpp"

namespace grushin::detail {

// Double-exponential rule; copes with integrable endpoint blowups.
template <class F>
double tanh_sinh(F&& fn, double a, double b, double tol = 1e-13) {
  if (a == b) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate(fn, a, b, tol);
}

// Root of fn on [a, b] given fa, fb of opposite sign; the final bracket is
// narrower than abs_tol + rel_tol * |x|.
template <class F>
double solve_bracketed(F&& fn, double a, double b, double fa, double fb, double abs_tol,
                       double rel_tol, const char* what) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa < 0.0) == (fb < 0.0))
    throw NumericalError(std::string(what) + ": root not bracketed",
                         {{"a", a}, {"b", b}, {"fa", fa}, {"fb", fb}});
  std::uintmax_t iters = 300;
  auto tol = [abs_tol, rel_tol](double lo, double hi) {
    return std::abs(hi - lo) <= abs_tol + rel_tol * std::max(std::abs(lo), std::abs(hi));
  };
  auto r = boost::math::tools::toms748_solve(fn, a, b, fa, fb, tol, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace grushin::detail
