#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "lprobust/estimator.hpp"
#include "lprobust/penalty.hpp"
#include "lprobust/transform.hpp"

namespace lprobust::sim {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Per-trial seed: mix64(mix64(master ^ mix64(cell + 1)) + trial).
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t trial);

/// Deterministic generator: std::mt19937_64 with uniforms built from the top
/// 53 bits, so draws do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform();                     // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double open_uniform();                // (0, 1]
  double normal();                      // Box-Muller
  std::size_t below(std::size_t n);     // [0, n)

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

struct UniformRadius {
  double max = 1.0;
};
/// Density (K+1) x^K on [0, 1].
struct PowerLaw {
  double K = 0.0;
};
struct CustomNoise {
  std::function<double(double)> inverse_cdf;
};

/// Distribution of the distance between a noisy output and the true output.
struct NoiseModel {
  std::variant<UniformRadius, PowerLaw, CustomNoise> v;

  double sample(Rng& rng) const;
  void validate() const;

  /// `uniform:<max>` or `powerlaw:<K>`.
  static NoiseModel parse(const std::string& spec);
  std::string to_string() const;
};

struct ScenarioConfig {
  Group group = Group::Translation;
  std::size_t dim = 1;
  std::size_t n_ideal = 0;
  std::size_t m_noise = 0;
  Transform truth = Transform::identity(Group::Translation, 1);
  NoiseModel noise{UniformRadius{1.0}};
  PenaltyFamily family = PenaltyFamily::lp(0.1);
  /// When set, run_trial anneals p instead of a single estimate.
  std::optional<AnnealSchedule> anneal;
  EstimateConfig estimate;
  std::uint64_t master_seed = 0;

  void validate() const;
};

struct GeneratedExperiment {
  Experiment experiment;
  Transform truth;
  std::size_t n_ideal;
};

/// n_ideal inputs uniform in [-1,1]^dim with exact outputs, plus m_noise
/// pairs displaced from the true output by r*u (r from the noise model, u
/// uniform on the unit sphere), shuffled. Everything derives from `seed`.
GeneratedExperiment generate_experiment(const ScenarioConfig& cfg, std::uint64_t seed);
inline GeneratedExperiment generate_experiment(const ScenarioConfig& cfg) {
  return generate_experiment(cfg, cfg.master_seed);
}

struct TrialRecord {
  std::uint64_t seed = 0;
  Transform estimated = Transform::identity(Group::Translation, 1);
  double param_error = 0.0;
  bool exact_recovery = false;
  double objective = 0.0;
  std::size_t pos_size = 0;
  /// |POS(truth)|; at least n_ideal.
  std::size_t truth_pos_size = 0;
  /// Largest |POS(c)| over data-induced candidates c away from the truth.
  std::size_t rival_consensus = 0;

  std::string to_json() const;
};

/// Recovery tolerance: 1e-6 * (1 + |truth params|).
double recovery_tolerance(const Transform& truth);

TrialRecord run_trial(const ScenarioConfig& cfg, std::uint64_t seed);
inline TrialRecord run_trial(const ScenarioConfig& cfg) {
  return run_trial(cfg, cfg.master_seed);
}

struct ProfileCell {
  double p = 0.0;
  double inlier_ratio = 0.0;
  std::size_t n_ideal = 0;
  std::size_t trials = 0;
  std::size_t recoveries = 0;
  double analytic_bound = 0.0;
  std::vector<TrialRecord> records;

  double rate() const {
    return trials == 0 ? 0.0 : static_cast<double>(recoveries) / static_cast<double>(trials);
  }
};

struct RobustnessProfile {
  std::vector<double> p_values;
  std::vector<double> ratios;
  /// Row-major: cells[pi * ratios.size() + ri].
  std::vector<ProfileCell> cells;

  const ProfileCell& at(std::size_t pi, std::size_t ri) const {
    return cells[pi * ratios.size() + ri];
  }
  /// Header `p,inlier_ratio,trials,recoveries,rate,analytic_bound`.
  std::string to_csv() const;
  /// One TrialRecord per line, cell-major.
  std::string to_jsonl() const;
};

/// Sweeps p x (n/M) with `trials` seeded trials per cell. n = round(ratio * M)
/// with M = base.m_noise. The family's exponent is replaced by each p.
RobustnessProfile breakdown_profile(const ScenarioConfig& base, const std::vector<double>& p_values,
                                    const std::vector<double>& ratios, std::size_t trials,
                                    std::size_t threads = 0);

/// Fraction of `trials` in which M sorted uniforms all satisfy
/// |d_(i) - i/M| < M^(a-1).
double order_stat_check(std::size_t M, double a, std::size_t trials, std::uint64_t seed = 1);

}  // namespace lprobust::sim
