#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lprobust/penalty.hpp"
#include "lprobust/transform.hpp"

namespace lprobust {

struct EstimationResult {
  Transform best;
  double objective = 0.0;
  std::size_t pos_size = 0;
  std::size_t candidates_evaluated = 0;
  std::size_t refinement_steps = 0;
};

/// Shrinking coordinate-grid search around the best candidate.
struct RefineConfig {
  /// Unset: on only for non-uniform scaling with dim >= 2.
  std::optional<bool> enabled;
  /// Initial step per coordinate, relative to (1 + |param|). Absolute for angles.
  double initial_radius = 0.25;
  double shrink = 0.5;
  std::size_t iterations = 40;
  std::size_t steps_per_side = 2;
};

struct EstimateConfig {
  RefineConfig refine;
  /// Absolute residual tolerance used to report pos_size.
  double pos_tol = 1e-9;
};

/// Data-induced candidate transforms: one per pair (translation O - I,
/// uniform scale |O|/|I|, per-axis ratios, angle difference), in pair order,
/// with near-duplicates (1e-12) merged. Pairs inducing an out-of-group
/// candidate (non-positive scale) are skipped.
std::vector<Transform> candidate_transforms(const Experiment& exp, Group group);

/// Minimizes objective_value over the candidates, optionally refined.
EstimationResult estimate(const Experiment& exp, Group group, const PenaltyFamily& f,
                          const EstimateConfig& config = {});

/// Candidate maximizing the precise observation set (residual <= tol).
EstimationResult estimate_l0(const Experiment& exp, Group group, double tol = 1e-9);

/// Indices i with residual(pair_i, t) <= tol, ascending.
std::vector<std::size_t> pos(const Experiment& exp, const Transform& t, double tol);

struct AnnealSchedule {
  std::vector<double> p_values;
  std::size_t stop_stable = 2;

  static AnnealSchedule default_schedule();
  void validate() const;
};

struct AnnealConfig {
  EstimateConfig estimate;
  /// Two estimates agree when param_distance <= agree_tol * (1 + |params|).
  double agree_tol = 1e-9;
  double l0_tol = 1e-9;
  /// Penalty family annealed; only its exponent changes. Defaults to Lp.
  std::optional<PenaltyFamily> family;
};

struct AnnealResult {
  EstimationResult result;
  double final_p = 0.0;
  std::vector<double> p_visited;
  std::vector<Transform> path;
  /// Whether the final estimate coincides with the L0 consensus estimate.
  bool matches_l0 = false;
  std::size_t l0_pos_size = 0;
};

AnnealResult anneal_p(const Experiment& exp, Group group, const AnnealSchedule& schedule,
                      const AnnealConfig& config = {});

}  // namespace lprobust
