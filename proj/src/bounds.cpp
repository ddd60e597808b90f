#include "lprobust/bounds.hpp"

#include <cmath>
#include <string>

#include "lprobust/transform.hpp"

namespace lprobust::bounds {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw InvalidArgument(msg);
}

void check_exponents(double M, double a, double p) {
  require(M >= 1.0, "M must be at least 1");
  require(a > 0.5 && a < 1.0, "a must lie in (1/2, 1)");
  require(p > 0.0 && p < 1.0, "p must lie in (0, 1)");
}

}  // namespace

void BoundParams::validate() const {
  check_exponents(M, a, p);
  require(d_T > 0.0 && std::isfinite(d_T), "d_T must be positive");
}

double concentration_probability(double M, double a) {
  const double tail = 2.0 * std::exp(-2.0 * std::pow(M, 2.0 * a - 1.0));
  if (tail >= 1.0) return 0.0;
  // (1 - t)^M through log1p keeps precision when t is tiny.
  return std::exp(M * std::log1p(-tail));
}

double confidence_exponent_exact(std::size_t M, double target) {
  require(M >= 2, "M must be at least 2");
  require(target > 0.0 && target < 1.0, "target must lie in (0, 1)");
  const double m = static_cast<double>(M);
  double lo = 0.5;
  double hi = 1.0;
  if (concentration_probability(m, hi) < target) {
    throw Infeasible("no exponent a < 1 reaches confidence " + std::to_string(target) +
                     " for M=" + std::to_string(M));
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (concentration_probability(m, mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (hi >= 1.0) {
    throw Infeasible("confidence target unreachable below a = 1");
  }
  return hi;
}

double min_confidence_exponent(std::size_t M, double target) {
  return std::round(confidence_exponent_exact(M, target) * 1000.0) / 1000.0;
}

double tfg_bound_uniform(double M, double a) {
  require(M >= 1.0, "M must be at least 1");
  return 2.0 * std::pow(M, a);
}

double tsg_bound_uniform(const BoundParams& bp) {
  bp.validate();
  const double ma = std::pow(bp.M, bp.a);
  const double span = bp.M + 1.0 - ma;
  return std::pow(span, bp.p) * std::pow(bp.d_T, 1.0 - bp.p) - bp.d_T / (1.0 + bp.p) + ma;
}

double tsg_maximizer_uniform(double M, double a, double p) {
  check_exponents(M, a, p);
  return std::pow(1.0 - p * p, 1.0 / p) * (M + 1.0 - std::pow(M, a));
}

double tsg_max_uniform(double M, double a, double p) {
  check_exponents(M, a, p);
  const double ma = std::pow(M, a);
  return p * std::pow(1.0 - p * p, (1.0 - p) / p) * (M + 1.0 - ma) + ma;
}

double breakdown_ratio(double p, double M, double a) {
  return (tfg_bound_uniform(M, a) + tsg_max_uniform(M, a, p)) / M;
}

double tfg_bound_general(const Cdf& F, double d_T, double p, double M) {
  require(d_T > 0.0, "d_T must be positive");
  require(p > 0.0 && p < 1.0, "p must lie in (0, 1)");
  const double inv2p = std::pow(2.0, -p);
  return (F(d_T) - F(0.75 * d_T)) * M - F(0.25 * d_T) * M * inv2p +
         (F(0.75 * d_T) - F(0.5 * d_T)) * M * inv2p;
}

double tsg_bound_general(const Cdf& F, double d_T, double p, double M) {
  require(d_T > 0.0, "d_T must be positive");
  require(p > 0.0 && p < 1.0, "p must lie in (0, 1)");
  const double fd = F(d_T);
  if (fd > 0.5) return M * (1.0 - fd);
  if (fd >= 0.25) {
    const double f32 = F(1.5 * d_T);
    return (std::pow(1.5, p) - std::pow(0.5, p)) * (1.0 - f32) * M + (f32 - fd) * M;
  }
  // 1/0.1 must count as 10, not 9.
  const auto steps = static_cast<std::size_t>(std::floor(1.0 / d_T + 1e-12));
  double total = 0.0;
  for (std::size_t i = 1; i + 1 <= steps; ++i) {
    const double di = static_cast<double>(i);
    total += (std::pow(di + 1.0, p) - std::pow(di, p)) *
             (F((di + 1.0) * d_T) - F(di * d_T)) * M;
  }
  total += (1.0 - F(static_cast<double>(steps) * d_T)) * M;
  total += (F(2.0 * d_T) - fd) * M;
  return total;
}

}  // namespace lprobust::bounds
