#pragma once

// Batched objective kernels.
//
// The estimator evaluates sum_i penalty(|O_i - T(I_i)|) for many candidate
// transforms over the same experiment. Every supported group acts as an affine
// map T(x) = L x + b, so the experiment is packed once into coordinate-major
// arrays and each evaluation is a single pass over them. A scalar reference
// kernel defines the result; the AVX2 kernel processes four pairs per step and
// must agree with it to ~1e-13 relative.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "lprobust/penalty.hpp"
#include "lprobust/transform.hpp"

namespace lprobust::kernels {

/// Coordinate-major copy of an experiment: in[k * count + i] is component k of
/// input i. snap_tol[i] is the snap tolerance of pair i.
struct PackedPairs {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> in;
  std::vector<double> out;
  std::vector<double> snap_tol;

  static PackedPairs pack(const Experiment& exp);
};

/// T(x) = linear * x + offset, linear row-major dim x dim.
struct AffineMap {
  std::size_t dim = 0;
  std::vector<double> linear;
  std::vector<double> offset;

  static AffineMap from(const Transform& t);
};

/// Flattened penalty parameters shared by all kernel variants.
struct PenaltyParams {
  enum class Kind { Lp, L0, SrPiecewise } kind = Kind::Lp;
  double p = 1.0;
  double q = 1.0;
  double knee = 0.0;      // k * p for the piecewise family
  double log_c = 0.0;     // log C(p)
  double l0_tol = 0.0;

  static PenaltyParams from(const PenaltyFamily& f);
};

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// True when the variant was compiled in and the CPU supports it.
bool isa_available(Isa isa);

/// The variant penalty_sum() dispatches to.
Isa active_isa();

/// Pins dispatch to one variant (tests and benchmarks); nullopt restores
/// automatic selection. Requests for an unavailable variant fall back to scalar.
void force_isa(std::optional<Isa> isa);

double penalty_sum_scalar(const PackedPairs& pairs, const AffineMap& map,
                          const PenaltyParams& pen);

#if defined(LPROBUST_HAVE_AVX2)
double penalty_sum_avx2(const PackedPairs& pairs, const AffineMap& map,
                        const PenaltyParams& pen);
#endif

double penalty_sum(const PackedPairs& pairs, const AffineMap& map,
                   const PenaltyParams& pen);

/// Number of pairs whose residual is at most `tol` (absolute).
std::size_t count_within(const PackedPairs& pairs, const AffineMap& map, double tol);

}  // namespace lprobust::kernels
