#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "lprobust/transform.hpp"

namespace lprobust {

/// x^p, 0 < p <= 1.
struct LpPenalty {
  double p;
};

/// 0 when x <= tol, 1 otherwise.
struct L0Penalty {
  double tol = 1e-9;
};

/// x^p for x >= k*p, C(p) x^q below, with C(p) = (k p)^(p - q) so the two
/// branches meet at x = k*p.
struct SrPiecewisePenalty {
  double p;
  double q = 2.0;
  double k = 1.0;
};

/// Residual penalty selector. Construct through the factories so the
/// parameter ranges are checked.
class PenaltyFamily {
 public:
  using Variant = std::variant<LpPenalty, L0Penalty, SrPiecewisePenalty>;

  static PenaltyFamily lp(double p);
  static PenaltyFamily l0(double tol = 1e-9);
  static PenaltyFamily sr_piecewise(double p, double q = 2.0, double k = 1.0);

  /// Parses the flat grammar `lp:<p>`, `l0:<tol>`, `sr:<p>,<q>,<k>`.
  static PenaltyFamily parse(std::string_view spec);

  const Variant& variant() const { return v_; }

  /// Same family with its exponent replaced (L0 is returned unchanged).
  PenaltyFamily with_p(double p) const;

  std::string to_string() const;

 private:
  explicit PenaltyFamily(Variant v) : v_(v) {}
  Variant v_;
};

/// log C(p) for the piecewise family, computed without forming (kp)^(p-q).
double sr_log_constant(const SrPiecewisePenalty& f);

double penalty(const PenaltyFamily& f, double x);

/// Sum over pairs of penalty(residual). Residuals within the exact-consistency
/// tolerance are taken as 0.
double objective_value(const Experiment& exp, const Transform& t,
                       const PenaltyFamily& f);

}  // namespace lprobust
