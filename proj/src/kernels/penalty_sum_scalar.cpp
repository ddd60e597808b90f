#include <cmath>

#include "lprobust/kernels.hpp"

namespace lprobust::kernels {

PackedPairs PackedPairs::pack(const Experiment& exp) {
  if (exp.dim_in() != exp.dim_out()) {
    throw InvalidArgument("input and output dimensions must agree");
  }
  PackedPairs pk;
  pk.count = exp.size();
  pk.dim = exp.dim_in();
  pk.in.resize(pk.count * pk.dim);
  pk.out.resize(pk.count * pk.dim);
  pk.snap_tol.resize(pk.count);
  for (std::size_t i = 0; i < pk.count; ++i) {
    const auto& pr = exp[i];
    for (std::size_t k = 0; k < pk.dim; ++k) {
      pk.in[k * pk.count + i] = pr.input[k];
      pk.out[k * pk.count + i] = pr.output[k];
    }
    pk.snap_tol[i] = snap_tolerance(pr);
  }
  return pk;
}

AffineMap AffineMap::from(const Transform& t) {
  const std::size_t d = t.dim();
  AffineMap m;
  m.dim = d;
  m.linear.assign(d * d, 0.0);
  m.offset.assign(d, 0.0);
  const auto& p = t.params();
  switch (t.group()) {
    case Group::Translation:
      for (std::size_t k = 0; k < d; ++k) {
        m.linear[k * d + k] = 1.0;
        m.offset[k] = p[k];
      }
      break;
    case Group::UniformScaling:
      for (std::size_t k = 0; k < d; ++k) m.linear[k * d + k] = p[0];
      break;
    case Group::NonUniformScaling:
      for (std::size_t k = 0; k < d; ++k) m.linear[k * d + k] = p[k];
      break;
    case Group::Rotation2D: {
      const double c = std::cos(p[0]);
      const double s = std::sin(p[0]);
      m.linear = {c, -s, s, c};
      break;
    }
  }
  return m;
}

PenaltyParams PenaltyParams::from(const PenaltyFamily& f) {
  PenaltyParams pp;
  std::visit(
      [&pp](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, LpPenalty>) {
          pp.kind = Kind::Lp;
          pp.p = fam.p;
        } else if constexpr (std::is_same_v<T, L0Penalty>) {
          pp.kind = Kind::L0;
          pp.l0_tol = fam.tol;
        } else {
          pp.kind = Kind::SrPiecewise;
          pp.p = fam.p;
          pp.q = fam.q;
          pp.knee = fam.k * fam.p;
          pp.log_c = sr_log_constant(fam);
        }
      },
      f.variant());
  return pp;
}

namespace {

double residual_at(const PackedPairs& pk, const AffineMap& m, std::size_t i) {
  const std::size_t d = pk.dim;
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double pred = m.offset[k];
    for (std::size_t j = 0; j < d; ++j) pred += m.linear[k * d + j] * pk.in[j * pk.count + i];
    const double diff = pk.out[k * pk.count + i] - pred;
    s += diff * diff;
  }
  return std::sqrt(s);
}

double penalize(const PenaltyParams& pen, double x) {
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

double penalty_sum_scalar(const PackedPairs& pk, const AffineMap& m,
                          const PenaltyParams& pen) {
  if (m.dim != pk.dim) throw InvalidArgument("penalty_sum: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < pk.count; ++i) {
    double r = residual_at(pk, m, i);
    if (r <= pk.snap_tol[i]) r = 0.0;
    total += penalize(pen, r);
  }
  return total;
}

std::size_t count_within(const PackedPairs& pk, const AffineMap& m, double tol) {
  if (m.dim != pk.dim) throw InvalidArgument("count_within: dimension mismatch");
  std::size_t n = 0;
  for (std::size_t i = 0; i < pk.count; ++i) {
    if (residual_at(pk, m, i) <= tol) ++n;
  }
  return n;
}

}  // namespace lprobust::kernels
