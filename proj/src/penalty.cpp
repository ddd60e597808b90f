#include "lprobust/penalty.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

namespace lprobust {

namespace {

double parse_number(std::string_view s) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw InvalidArgument("bad number '" + std::string(s) + "' in family spec");
  }
  return v;
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    out.push_back(parse_number(s.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

PenaltyFamily PenaltyFamily::lp(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("Lp family requires 0 < p <= 1");
  return PenaltyFamily(LpPenalty{p});
}

PenaltyFamily PenaltyFamily::l0(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw InvalidArgument("L0 family requires a positive tolerance");
  }
  return PenaltyFamily(L0Penalty{tol});
}

PenaltyFamily PenaltyFamily::sr_piecewise(double p, double q, double k) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("SR family requires 0 < p < 1");
  if (!(q >= 1.0)) throw InvalidArgument("SR family requires q >= 1");
  if (!(k > 0.0)) throw InvalidArgument("SR family requires k > 0");
  return PenaltyFamily(SrPiecewisePenalty{p, q, k});
}

PenaltyFamily PenaltyFamily::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("family spec must look like lp:<p>, l0:<tol> or sr:<p>,<q>,<k>");
  }
  const auto kind = spec.substr(0, colon);
  const auto args = parse_list(spec.substr(colon + 1));
  if (kind == "lp" && args.size() == 1) return lp(args[0]);
  if (kind == "l0" && args.size() == 1) return l0(args[0]);
  if (kind == "sr" && args.size() == 3) return sr_piecewise(args[0], args[1], args[2]);
  throw InvalidArgument("unrecognized family spec '" + std::string(spec) + "'");
}

PenaltyFamily PenaltyFamily::with_p(double p) const {
  return std::visit(
      [p](const auto& f) -> PenaltyFamily {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LpPenalty>) {
          return lp(p);
        } else if constexpr (std::is_same_v<T, SrPiecewisePenalty>) {
          return sr_piecewise(p, f.q, f.k);
        } else {
          return PenaltyFamily(f);
        }
      },
      v_);
}

std::string PenaltyFamily::to_string() const {
  auto num = [](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  std::ostringstream os;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LpPenalty>) {
          os << "lp:" << num(f.p);
        } else if constexpr (std::is_same_v<T, L0Penalty>) {
          os << "l0:" << num(f.tol);
        } else {
          os << "sr:" << num(f.p) << ',' << num(f.q) << ',' << num(f.k);
        }
      },
      v_);
  return os.str();
}

double sr_log_constant(const SrPiecewisePenalty& f) {
  return (f.p - f.q) * std::log(f.k * f.p);
}

double penalty(const PenaltyFamily& f, double x) {
  if (!(x >= 0.0)) throw InvalidArgument("penalty of a negative residual");
  return std::visit(
      [x](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, LpPenalty>) {
          return x == 0.0 ? 0.0 : std::pow(x, fam.p);
        } else if constexpr (std::is_same_v<T, L0Penalty>) {
          return x <= fam.tol ? 0.0 : 1.0;
        } else {
          if (x == 0.0) return 0.0;
          if (x >= fam.k * fam.p) return std::pow(x, fam.p);
          return std::exp(sr_log_constant(fam) + fam.q * std::log(x));
        }
      },
      f.variant());
}

double objective_value(const Experiment& exp, const Transform& t,
                       const PenaltyFamily& f) {
  double total = 0.0;
  for (const auto& pr : exp.pairs()) {
    double r = residual(pr, t);
    if (r <= snap_tolerance(pr)) r = 0.0;
    total += penalty(f, r);
  }
  return total;
}

}  // namespace lprobust
