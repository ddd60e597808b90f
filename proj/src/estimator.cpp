#include "lprobust/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "lprobust/kernels.hpp"

namespace lprobust {

namespace {

constexpr double kDuplicateTol = 1e-12;
constexpr double kTieRelTol = 1e-12;

bool tied(double a, double b) {
  return std::abs(a - b) <= kTieRelTol * std::max({1.0, std::abs(a), std::abs(b)});
}

void check_square(const Experiment& exp, Group group) {
  if (exp.dim_in() != exp.dim_out()) {
    throw InvalidArgument("input and output dimensions must agree");
  }
  if (group == Group::Rotation2D && exp.dim_in() != 2) {
    throw InvalidArgument("rotation requires two-dimensional observations");
  }
}

std::optional<Transform> induced_candidate(const ObservationPair& pr, Group group) {
  const auto& in = pr.input.coords;
  const auto& out = pr.output.coords;
  const std::size_t d = in.size();
  switch (group) {
    case Group::Translation: {
      std::vector<double> a(d);
      for (std::size_t k = 0; k < d; ++k) a[k] = out[k] - in[k];
      return Transform(group, d, std::move(a));
    }
    case Group::UniformScaling: {
      const double ni = norm(in);
      const double no = norm(out);
      if (ni == 0.0 || no == 0.0) return std::nullopt;
      const double s = no / ni;
      if (!std::isfinite(s)) return std::nullopt;
      return Transform(group, d, {s});
    }
    case Group::NonUniformScaling: {
      std::vector<double> s(d);
      for (std::size_t k = 0; k < d; ++k) {
        if (in[k] == 0.0) return std::nullopt;
        s[k] = out[k] / in[k];
        if (!(s[k] > 0.0) || !std::isfinite(s[k])) return std::nullopt;
      }
      return Transform(group, d, std::move(s));
    }
    case Group::Rotation2D: {
      if ((in[0] == 0.0 && in[1] == 0.0) || (out[0] == 0.0 && out[1] == 0.0)) {
        return std::nullopt;
      }
      return Transform::rotation(std::atan2(out[1], out[0]) - std::atan2(in[1], in[0]));
    }
  }
  return std::nullopt;
}

// Index of the preferred entry: lowest objective, then smallest parameter
// norm, then lowest index. Reduction runs in index order.
std::size_t select_best(const std::vector<Transform>& cands,
                        const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < cands.size(); ++c) {
    if (tied(scores[c], scores[best])) {
      if (cands[c].param_norm() < cands[best].param_norm()) best = c;
    } else if (scores[c] < scores[best]) {
      best = c;
    }
  }
  return best;
}

bool refine_by_default(Group group, std::size_t dim) {
  return group == Group::NonUniformScaling && dim >= 2;
}

struct Refinement {
  Transform best;
  double objective;
  std::size_t steps;
};

Refinement grid_refine(const kernels::PackedPairs& pk, const kernels::PenaltyParams& pen,
                       Transform start, double start_obj, const RefineConfig& cfg) {
  const auto group = start.group();
  const auto dim = start.dim();
  std::vector<double> params = start.params();
  std::vector<double> radius(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    radius[k] = group == Group::Rotation2D ? cfg.initial_radius
                                           : cfg.initial_radius * (1.0 + std::abs(params[k]));
  }
  Transform best = std::move(start);
  double best_obj = start_obj;
  std::size_t steps = 0;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    ++steps;
    for (std::size_t k = 0; k < params.size(); ++k) {
      for (std::size_t j = 1; j <= cfg.steps_per_side; ++j) {
        for (double sign : {-1.0, 1.0}) {
          std::vector<double> trial = best.params();
          trial[k] += sign * static_cast<double>(j) * radius[k];
          if ((group == Group::UniformScaling || group == Group::NonUniformScaling) &&
              !(trial[k] > 0.0)) {
            continue;
          }
          Transform t(group, dim, std::move(trial));
          const double obj = kernels::penalty_sum(pk, kernels::AffineMap::from(t), pen);
          if (obj < best_obj && !tied(obj, best_obj)) {
            best = std::move(t);
            best_obj = obj;
          }
        }
      }
    }
    for (auto& r : radius) r *= cfg.shrink;
  }
  return {std::move(best), best_obj, steps};
}

}  // namespace

std::vector<Transform> candidate_transforms(const Experiment& exp, Group group) {
  check_square(exp, group);
  std::vector<Transform> out;
  out.reserve(exp.size());
  for (const auto& pr : exp.pairs()) {
    auto cand = induced_candidate(pr, group);
    if (!cand) continue;
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Transform& t) {
      return param_distance(t, *cand) <= kDuplicateTol;
    });
    if (!duplicate) out.push_back(std::move(*cand));
  }
  if (out.empty()) {
    throw DegenerateExperiment("experiment induces no candidate transforms for group " +
                               std::string(to_string(group)));
  }
  return out;
}

EstimationResult estimate(const Experiment& exp, Group group, const PenaltyFamily& f,
                          const EstimateConfig& config) {
  const auto cands = candidate_transforms(exp, group);
  const auto pk = kernels::PackedPairs::pack(exp);
  const auto pen = kernels::PenaltyParams::from(f);

  std::vector<double> scores(cands.size());
  for (std::size_t c = 0; c < cands.size(); ++c) {
    scores[c] = kernels::penalty_sum(pk, kernels::AffineMap::from(cands[c]), pen);
  }
  const std::size_t bi = select_best(cands, scores);

  EstimationResult res{cands[bi], scores[bi], 0, cands.size(), 0};
  const bool refine = config.refine.enabled.value_or(refine_by_default(group, exp.dim_in()));
  if (refine && config.refine.iterations > 0) {
    auto r = grid_refine(pk, pen, res.best, res.objective, config.refine);
    res.best = std::move(r.best);
    res.objective = r.objective;
    res.refinement_steps = r.steps;
  }
  res.pos_size = kernels::count_within(pk, kernels::AffineMap::from(res.best), config.pos_tol);
  return res;
}

EstimationResult estimate_l0(const Experiment& exp, Group group, double tol) {
  if (!(tol >= 0.0)) throw InvalidArgument("POS tolerance must be non-negative");
  const auto cands = candidate_transforms(exp, group);
  const auto pk = kernels::PackedPairs::pack(exp);

  std::vector<double> scores(cands.size());
  std::vector<std::size_t> counts(cands.size());
  for (std::size_t c = 0; c < cands.size(); ++c) {
    counts[c] = kernels::count_within(pk, kernels::AffineMap::from(cands[c]), tol);
    scores[c] = static_cast<double>(exp.size() - counts[c]);
  }
  const std::size_t bi = select_best(cands, scores);
  return EstimationResult{cands[bi], scores[bi], counts[bi], cands.size(), 0};
}

std::vector<std::size_t> pos(const Experiment& exp, const Transform& t, double tol) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    if (residual(exp[i], t) <= tol) idx.push_back(i);
  }
  return idx;
}

AnnealSchedule AnnealSchedule::default_schedule() {
  return AnnealSchedule{{0.9, 0.7, 0.5, 0.3, 0.2, 0.1, 0.05, 0.02}, 2};
}

void AnnealSchedule::validate() const {
  if (p_values.empty()) throw InvalidArgument("anneal schedule is empty");
  if (stop_stable == 0) throw InvalidArgument("stop_stable must be at least 1");
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    const double p = p_values[i];
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("anneal p values must lie in (0,1)");
    if (i > 0 && !(p < p_values[i - 1])) {
      throw InvalidArgument("anneal p values must be strictly decreasing");
    }
  }
}

AnnealResult anneal_p(const Experiment& exp, Group group, const AnnealSchedule& schedule,
                      const AnnealConfig& config) {
  schedule.validate();
  const PenaltyFamily base = config.family.value_or(PenaltyFamily::lp(0.5));

  auto agree = [&](const Transform& a, const Transform& b) {
    return param_distance(a, b) <= config.agree_tol * (1.0 + a.param_norm());
  };

  AnnealResult out{estimate(exp, group, base.with_p(schedule.p_values.front()), config.estimate),
                   0.0, {}, {}, false, 0};
  std::size_t streak = 0;
  for (std::size_t i = 0; i < schedule.p_values.size(); ++i) {
    const double p = schedule.p_values[i];
    EstimationResult r = i == 0 ? out.result
                                : estimate(exp, group, base.with_p(p), config.estimate);
    streak = (!out.path.empty() && agree(out.path.back(), r.best)) ? streak + 1 : 1;
    out.p_visited.push_back(p);
    out.path.push_back(r.best);
    out.result = std::move(r);
    out.final_p = p;
    if (streak >= schedule.stop_stable) break;
  }

  const auto l0 = estimate_l0(exp, group, config.l0_tol);
  out.l0_pos_size = l0.pos_size;
  out.matches_l0 = agree(l0.best, out.result.best);
  return out;
}

}  // namespace lprobust
