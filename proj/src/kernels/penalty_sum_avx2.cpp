// AVX2 variant of the penalty-sum kernel. Compiled with -mavx2 -mfma and only
// reached through dispatch after a CPU feature check.

#include <immintrin.h>

#include <cmath>

#include "lprobust/kernels.hpp"

namespace lprobust::kernels {

namespace {

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

// Cephes-style log for positive normal doubles: x = m * 2^e with m in
// [sqrt(1/2), sqrt(2)), log(1 + f) by a 5/5 rational approximation.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
  // int64 -> double for small non-negative values via the 2^52 trick.
  const __m256i magic_i = _mm256_set1_epi64x(0x4330000000000000LL);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_bits, magic_i)),
                            set1(4503599627370496.0));
  e = _mm256_sub_pd(e, set1(1022.0));

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i half_bits = _mm256_set1_epi64x(0x3FE0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_bits));

  const __m256d small = _mm256_cmp_pd(m, set1(0.70710678118654752440), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(small, set1(1.0)));
  m = _mm256_add_pd(_mm256_sub_pd(m, set1(1.0)), _mm256_and_pd(small, m));

  const __m256d z = _mm256_mul_pd(m, m);

  __m256d num = set1(1.01875663804580931796E-4);
  num = _mm256_fmadd_pd(num, m, set1(4.97494994976747001425E-1));
  num = _mm256_fmadd_pd(num, m, set1(4.70579119878881725854E0));
  num = _mm256_fmadd_pd(num, m, set1(1.44989225341610930846E1));
  num = _mm256_fmadd_pd(num, m, set1(1.79368678507819816313E1));
  num = _mm256_fmadd_pd(num, m, set1(7.70838733755885391666E0));

  __m256d den = _mm256_add_pd(m, set1(1.12873587189167450590E1));
  den = _mm256_fmadd_pd(den, m, set1(4.52279145837532221105E1));
  den = _mm256_fmadd_pd(den, m, set1(8.29875266912776603211E1));
  den = _mm256_fmadd_pd(den, m, set1(7.11544750618563894466E1));
  den = _mm256_fmadd_pd(den, m, set1(2.31251620126765340583E1));

  __m256d y = _mm256_mul_pd(m, _mm256_div_pd(_mm256_mul_pd(z, num), den));
  y = _mm256_fnmadd_pd(e, set1(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(set1(0.5), z, y);
  __m256d r = _mm256_add_pd(m, y);
  return _mm256_fmadd_pd(e, set1(0.693359375), r);
}

// Cephes-style exp: x = n ln2 + r, exp(r) by a Pade form, scaled by 2^n.
inline __m256d exp_pd(__m256d x) {
  x = _mm256_min_pd(x, set1(709.43));
  x = _mm256_max_pd(x, set1(-708.39));

  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, set1(1.4426950408889634073599)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(fx, set1(6.93145751953125E-1), x);
  x = _mm256_fnmadd_pd(fx, set1(1.42860682030941723212E-6), x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d px = set1(1.26177193074810590878E-4);
  px = _mm256_fmadd_pd(px, xx, set1(3.02994407707441961300E-2));
  px = _mm256_fmadd_pd(px, xx, set1(9.99999999999999999910E-1));
  px = _mm256_mul_pd(px, x);

  __m256d qx = set1(3.00198505138664455042E-6);
  qx = _mm256_fmadd_pd(qx, xx, set1(2.52448340349684104192E-3));
  qx = _mm256_fmadd_pd(qx, xx, set1(2.27265548208155028766E-1));
  qx = _mm256_fmadd_pd(qx, xx, set1(2.00000000000000000009E0));

  __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  r = _mm256_fmadd_pd(set1(2.0), r, set1(1.0));

  const __m128i n32 = _mm256_cvtpd_epi32(fx);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(r, _mm256_castsi256_pd(n64));
}

// Penalty of four residuals. Lanes with r == 0 (after snapping) yield 0.
inline __m256d penalize_pd(const PenaltyParams& pen, __m256d r) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d is_zero = _mm256_cmp_pd(r, zero, _CMP_EQ_OQ);
  __m256d val;
  switch (pen.kind) {
    case PenaltyParams::Kind::L0: {
      const __m256d above = _mm256_cmp_pd(r, set1(pen.l0_tol), _CMP_GT_OQ);
      val = _mm256_and_pd(above, set1(1.0));
      break;
    }
    case PenaltyParams::Kind::Lp: {
      const __m256d safe = _mm256_blendv_pd(r, set1(1.0), is_zero);
      val = exp_pd(_mm256_mul_pd(set1(pen.p), log_pd(safe)));
      break;
    }
    case PenaltyParams::Kind::SrPiecewise:
    default: {
      const __m256d safe = _mm256_blendv_pd(r, set1(1.0), is_zero);
      const __m256d lx = log_pd(safe);
      const __m256d upper = _mm256_mul_pd(set1(pen.p), lx);
      const __m256d lower = _mm256_fmadd_pd(set1(pen.q), lx, set1(pen.log_c));
      const __m256d on_upper = _mm256_cmp_pd(r, set1(pen.knee), _CMP_GE_OQ);
      val = exp_pd(_mm256_blendv_pd(lower, upper, on_upper));
      break;
    }
  }
  return _mm256_blendv_pd(val, zero, is_zero);
}

double tail_penalty(const PenaltyParams& pen, double x) {
  if (x == 0.0) return 0.0;
  switch (pen.kind) {
    case PenaltyParams::Kind::Lp: return std::pow(x, pen.p);
    case PenaltyParams::Kind::L0: return x <= pen.l0_tol ? 0.0 : 1.0;
    case PenaltyParams::Kind::SrPiecewise:
      return x >= pen.knee ? std::pow(x, pen.p) : std::exp(pen.log_c + pen.q * std::log(x));
  }
  return 0.0;
}

}  // namespace

double penalty_sum_avx2(const PackedPairs& pk, const AffineMap& m,
                        const PenaltyParams& pen) {
  if (m.dim != pk.dim) throw InvalidArgument("penalty_sum: dimension mismatch");
  const std::size_t n = pk.count;
  const std::size_t d = pk.dim;

  // Residuals use the scalar kernel's operation order without fused
  // multiply-add so both paths snap and penalize identical values.
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ss = _mm256_setzero_pd();
    for (std::size_t k = 0; k < d; ++k) {
      __m256d pred = set1(m.offset[k]);
      for (std::size_t j = 0; j < d; ++j) {
        pred = _mm256_add_pd(pred, _mm256_mul_pd(set1(m.linear[k * d + j]),
                                                 _mm256_loadu_pd(&pk.in[j * n + i])));
      }
      const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(&pk.out[k * n + i]), pred);
      ss = _mm256_add_pd(ss, _mm256_mul_pd(diff, diff));
    }
    __m256d r = _mm256_sqrt_pd(ss);
    const __m256d snap = _mm256_cmp_pd(r, _mm256_loadu_pd(&pk.snap_tol[i]), _CMP_LE_OQ);
    r = _mm256_blendv_pd(r, _mm256_setzero_pd(), snap);
    acc = _mm256_add_pd(acc, penalize_pd(pen, r));
  }

  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);

  for (; i < n; ++i) {
    double ss = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      double pred = m.offset[k];
      for (std::size_t j = 0; j < d; ++j) pred += m.linear[k * d + j] * pk.in[j * n + i];
      const double diff = pk.out[k * n + i] - pred;
      ss += diff * diff;
    }
    double r = std::sqrt(ss);
    if (r <= pk.snap_tol[i]) r = 0.0;
    total += tail_penalty(pen, r);
  }
  return total;
}

}  // namespace lprobust::kernels
