#pragma once

// Closed-form robustness bounds for the Lp location estimator.
//
// Notation: M noise observations with sorted distances d_1 < ... < d_M from
// the true output, a rival translation at distance d_T from the truth, and a
// concentration exponent a in (1/2, 1) such that every sorted uniform order
// statistic lies within M^(a-1) of its mean with high probability. TFG and
// TSG are the normalized sums over noise with d_i <= d_T and d_i > d_T.

#include <cstddef>
#include <functional>
#include <stdexcept>

namespace lprobust::bounds {

/// Raised when no exponent a < 1 reaches the requested confidence.
class Infeasible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct BoundParams {
  double M;
  double a;
  double p;
  double d_T;

  void validate() const;
};

/// (1 - 2 exp(-2 M^(2a-1)))^M: lower bound on the probability that all M
/// sorted uniforms stay within M^(a-1) of i/M. Clamped to [0, 1].
double concentration_probability(double M, double a);

/// Smallest a in (1/2, 1) with concentration_probability(M, a) >= target,
/// bisected to 1e-10 and not rounded.
double confidence_exponent_exact(std::size_t M, double target);

/// confidence_exponent_exact rounded to three decimals.
double min_confidence_exponent(std::size_t M, double target);

/// Upper bound on TFG: 2 M^a.
double tfg_bound_uniform(double M, double a);

/// Upper bound on TSG for a given d_T:
/// (M+1-M^a)^p d_T^(1-p) - d_T/(1+p) + M^a.
double tsg_bound_uniform(const BoundParams& params);

/// d_T maximizing tsg_bound_uniform: (1-p^2)^(1/p) (M+1-M^a).
double tsg_maximizer_uniform(double M, double a, double p);

/// max over d_T of tsg_bound_uniform: p (1-p^2)^((1-p)/p) (M+1-M^a) + M^a.
double tsg_max_uniform(double M, double a, double p);

/// Sufficient inlier-to-noise ratio n/M:
/// (tfg_bound_uniform + tsg_max_uniform) / M.
double breakdown_ratio(double p, double M, double a);

/// Cumulative distribution of the unsorted noise distance on [0, inf).
using Cdf = std::function<double(double)>;

/// Bound on TFG for a general distance distribution:
/// (F(d) - F(3d/4)) M - F(d/4) M / 2^p + (F(3d/4) - F(d/2)) M / 2^p.
double tfg_bound_general(const Cdf& F, double d_T, double p, double M);

/// Piecewise bound on TSG for a general distance distribution, selected by
/// F(d_T): above 1/2, in [1/4, 1/2], and below 1/4 (refined telescoping sum).
double tsg_bound_general(const Cdf& F, double d_T, double p, double M);

}  // namespace lprobust::bounds
