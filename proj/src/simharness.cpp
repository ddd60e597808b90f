#include "lprobust/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lprobust/bounds.hpp"

namespace lprobust::sim {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t trial) {
  return mix64(mix64(master ^ mix64(cell + 1)) + trial);
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::open_uniform() { return 1.0 - uniform(); }

double Rng::normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  const double u1 = open_uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(th);
  return r * std::cos(th);
}

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw InvalidArgument("Rng::below(0)");
  // Rejection sampling over the largest multiple of n.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

double NoiseModel::sample(Rng& rng) const {
  return std::visit(
      [&rng](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, UniformRadius>) {
          return m.max * rng.open_uniform();
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          return std::pow(rng.open_uniform(), 1.0 / (m.K + 1.0));
        } else {
          return m.inverse_cdf(rng.open_uniform());
        }
      },
      v);
}

void NoiseModel::validate() const {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, UniformRadius>) {
          if (!(m.max > 0.0)) throw InvalidArgument("uniform noise radius must be positive");
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          if (!(m.K >= 0.0)) throw InvalidArgument("power-law exponent K must be >= 0");
        } else {
          if (!m.inverse_cdf) throw InvalidArgument("custom noise needs an inverse CDF");
        }
      },
      v);
}

NoiseModel NoiseModel::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw InvalidArgument("noise spec must look like uniform:<max> or powerlaw:<K>");
  }
  const std::string kind = spec.substr(0, colon);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(spec.substr(colon + 1), &used);
    if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw InvalidArgument("bad number in noise spec '" + spec + "'");
  }
  NoiseModel m;
  if (kind == "uniform") {
    m.v = UniformRadius{value};
  } else if (kind == "powerlaw") {
    m.v = PowerLaw{value};
  } else {
    throw InvalidArgument("unknown noise model '" + kind + "'");
  }
  m.validate();
  return m;
}

std::string NoiseModel::to_string() const {
  std::ostringstream os;
  os.precision(17);
  if (const auto* u = std::get_if<UniformRadius>(&v)) {
    os << "uniform:" << u->max;
  } else if (const auto* pl = std::get_if<PowerLaw>(&v)) {
    os << "powerlaw:" << pl->K;
  } else {
    os << "custom";
  }
  return os.str();
}

void ScenarioConfig::validate() const {
  if (n_ideal + m_noise < 1) throw InvalidArgument("scenario needs at least one pair");
  if (dim == 0) throw InvalidArgument("scenario dimension must be positive");
  if (truth.group() != group || truth.dim() != dim) {
    throw InvalidArgument("scenario truth does not match group and dimension");
  }
  noise.validate();
  if (anneal) anneal->validate();
}

GeneratedExperiment generate_experiment(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const std::size_t d = cfg.dim;
  std::vector<ObservationPair> pairs;
  pairs.reserve(cfg.n_ideal + cfg.m_noise);

  auto draw_input = [&] {
    Point x{std::vector<double>(d)};
    for (auto& c : x.coords) c = rng.uniform(-1.0, 1.0);
    return x;
  };

  for (std::size_t i = 0; i < cfg.n_ideal; ++i) {
    Point in = draw_input();
    Point out = apply(cfg.truth, in);
    pairs.push_back({std::move(in), std::move(out)});
  }
  for (std::size_t i = 0; i < cfg.m_noise; ++i) {
    Point in = draw_input();
    Point out = apply(cfg.truth, in);
    const double r = cfg.noise.sample(rng);
    std::vector<double> u(d);
    if (d == 1) {
      u[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    } else {
      double len = 0.0;
      do {
        for (auto& c : u) c = rng.normal();
        len = norm(u);
      } while (len == 0.0);
      for (auto& c : u) c /= len;
    }
    for (std::size_t k = 0; k < d; ++k) out[k] += r * u[k];
    pairs.push_back({std::move(in), std::move(out)});
  }

  for (std::size_t i = pairs.size(); i > 1; --i) {
    std::swap(pairs[i - 1], pairs[rng.below(i)]);
  }
  return {Experiment(d, d, std::move(pairs)), cfg.truth, cfg.n_ideal};
}

double recovery_tolerance(const Transform& truth) {
  return 1e-6 * (1.0 + truth.param_norm());
}

std::string TrialRecord::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["group"] = std::string(to_string(estimated.group()));
  j["estimated"] = estimated.params();
  j["param_error"] = param_error;
  j["exact_recovery"] = exact_recovery;
  j["objective"] = objective;
  j["pos_size"] = pos_size;
  j["truth_pos_size"] = truth_pos_size;
  j["rival_consensus"] = rival_consensus;
  return j.dump();
}

TrialRecord run_trial(const ScenarioConfig& cfg, std::uint64_t seed) {
  const auto gen = generate_experiment(cfg, seed);
  const Experiment exp = sanitize(gen.experiment, cfg.group);

  EstimationResult est = [&] {
    if (cfg.anneal) {
      AnnealConfig ac;
      ac.estimate = cfg.estimate;
      ac.family = cfg.family;
      return anneal_p(exp, cfg.group, *cfg.anneal, ac).result;
    }
    return estimate(exp, cfg.group, cfg.family, cfg.estimate);
  }();

  TrialRecord rec;
  rec.seed = seed;
  rec.param_error = param_distance(est.best, gen.truth);
  rec.exact_recovery = rec.param_error <= recovery_tolerance(gen.truth);
  rec.objective = est.objective;
  rec.pos_size = est.pos_size;

  auto consensus = [&exp](const Transform& t) {
    std::size_t n = 0;
    for (const auto& pr : exp.pairs()) n += is_consistent(pr, t) ? 1 : 0;
    return n;
  };
  rec.truth_pos_size = consensus(gen.truth);
  const double tol = recovery_tolerance(gen.truth);
  for (const auto& c : candidate_transforms(exp, cfg.group)) {
    if (param_distance(c, gen.truth) > tol) {
      rec.rival_consensus = std::max(rec.rival_consensus, consensus(c));
    }
  }
  rec.estimated = std::move(est.best);
  return rec;
}

namespace {

double analytic_overlay(double p, std::size_t M) {
  if (M < 2 || !(p > 0.0 && p < 1.0)) return std::numeric_limits<double>::quiet_NaN();
  try {
    const double a = bounds::min_confidence_exponent(M, 0.999);
    return bounds::breakdown_ratio(p, static_cast<double>(M), a);
  } catch (const bounds::Infeasible&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

RobustnessProfile breakdown_profile(const ScenarioConfig& base, const std::vector<double>& p_values,
                                    const std::vector<double>& ratios, std::size_t trials,
                                    std::size_t threads) {
  if (trials == 0) throw InvalidArgument("profile needs at least one trial per cell");
  if (p_values.empty() || ratios.empty()) throw InvalidArgument("profile grid is empty");
  for (double r : ratios) {
    if (!(r >= 0.0)) throw InvalidArgument("inlier ratios must be non-negative");
  }

  RobustnessProfile prof{p_values, ratios, {}};
  std::vector<ScenarioConfig> cell_cfg;
  for (double p : p_values) {
    for (double ratio : ratios) {
      ScenarioConfig cfg = base;
      cfg.family = base.family.with_p(p);
      cfg.n_ideal = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(base.m_noise)));
      cfg.validate();
      ProfileCell cell;
      cell.p = p;
      cell.inlier_ratio = ratio;
      cell.n_ideal = cfg.n_ideal;
      cell.trials = trials;
      cell.analytic_bound = analytic_overlay(p, base.m_noise);
      cell.records.resize(trials);
      prof.cells.push_back(std::move(cell));
      cell_cfg.push_back(std::move(cfg));
    }
  }

  const std::size_t jobs = prof.cells.size() * trials;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs);

  // Each job writes only its own slot; aggregation below is by cell index.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs && !failed; job = next++) {
      const std::size_t c = job / trials;
      const std::size_t t = job % trials;
      try {
        prof.cells[c].records[t] =
            run_trial(cell_cfg[c], trial_seed(base.master_seed, c, t));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& cell : prof.cells) {
    cell.recoveries = static_cast<std::size_t>(
        std::count_if(cell.records.begin(), cell.records.end(),
                      [](const TrialRecord& r) { return r.exact_recovery; }));
  }
  return prof;
}

std::string RobustnessProfile::to_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "p,inlier_ratio,trials,recoveries,rate,analytic_bound\n";
  for (const auto& c : cells) {
    os << c.p << ',' << c.inlier_ratio << ',' << c.trials << ',' << c.recoveries << ','
       << c.rate() << ',';
    if (std::isnan(c.analytic_bound)) {
      os << "nan";
    } else {
      os << c.analytic_bound;
    }
    os << '\n';
  }
  return os.str();
}

std::string RobustnessProfile::to_jsonl() const {
  std::string out;
  for (const auto& c : cells) {
    for (const auto& r : c.records) {
      out += r.to_json();
      out += '\n';
    }
  }
  return out;
}

double order_stat_check(std::size_t M, double a, std::size_t trials, std::uint64_t seed) {
  if (M < 2) throw InvalidArgument("order_stat_check needs M >= 2");
  if (!(a > 0.5 && a < 1.0)) throw InvalidArgument("a must lie in (1/2, 1)");
  if (trials == 0) throw InvalidArgument("order_stat_check needs at least one trial");
  const double m = static_cast<double>(M);
  const double band = std::pow(m, a - 1.0);
  std::vector<double> d(M);
  std::size_t pass = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(trial_seed(seed, 0, t));
    for (auto& x : d) x = rng.uniform();
    std::sort(d.begin(), d.end());
    bool ok = true;
    for (std::size_t i = 0; i < M && ok; ++i) {
      ok = std::abs(d[i] - static_cast<double>(i + 1) / m) < band;
    }
    pass += ok ? 1 : 0;
  }
  return static_cast<double>(pass) / static_cast<double>(trials);
}

}  // namespace lprobust::sim
