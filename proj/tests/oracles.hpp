#pragma once

// Test-only reference computations. Nothing here calls into the estimator or
// the kernels; each oracle recomputes its quantity from the raw data.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lprobust/transform.hpp"

namespace oracle {

/// sum_i |d_i - a|^p for 1-D offsets d_i (0^p = 0).
inline double lp_sum_1d(const std::vector<double>& d, double a, double p) {
  double s = 0.0;
  for (double x : d) {
    const double r = std::abs(x - a);
    if (r > 0.0) s += std::pow(r, p);
  }
  return s;
}

/// Minimum of lp_sum_1d over a uniform grid covering [min d, max d].
inline double grid_min_1d(const std::vector<double>& d, double p, double step) {
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  double best = lp_sum_1d(d, *lo, p);
  const auto n = static_cast<std::size_t>(std::ceil((*hi - *lo) / step));
  for (std::size_t i = 0; i <= n; ++i) {
    best = std::min(best, lp_sum_1d(d, *lo + static_cast<double>(i) * step, p));
  }
  return best;
}

/// |{i : |O_i - T(I_i)| <= tol}| computed from first principles.
inline std::size_t consensus(const lprobust::Experiment& exp, const lprobust::Transform& t,
                             double tol) {
  std::size_t n = 0;
  for (const auto& pr : exp.pairs()) {
    const auto y = lprobust::apply(t, pr.input);
    double s = 0.0;
    for (std::size_t k = 0; k < y.dim(); ++k) s += (pr.output[k] - y[k]) * (pr.output[k] - y[k]);
    n += std::sqrt(s) <= tol ? 1 : 0;
  }
  return n;
}

}  // namespace oracle
