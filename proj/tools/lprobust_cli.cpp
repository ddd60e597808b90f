// lprobust: generate synthetic experiments, estimate transforms with Lp / L0 /
// piecewise penalties, print the robustness-bound tables, and sweep
// breakdown profiles.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lprobust/bounds.hpp"
#include "lprobust/estimator.hpp"
#include "lprobust/experiment_io.hpp"
#include "lprobust/kernels.hpp"
#include "lprobust/simharness.hpp"

namespace {

using namespace lprobust;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDegenerate = 2;

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw InvalidArgument("bad number '" + item + "' in list '" + s + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("empty number list");
  return out;
}

// Writes to `path`, or stdout when the path is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

Transform default_truth(Group g, std::size_t dim, std::uint64_t seed) {
  sim::Rng rng(sim::mix64(seed ^ 0x7472757468ULL));
  switch (g) {
    case Group::Translation: {
      std::vector<double> a(dim);
      for (auto& v : a) v = rng.uniform(-5.0, 5.0);
      return Transform::translation(std::move(a));
    }
    case Group::UniformScaling:
      return Transform::uniform_scaling(dim, rng.uniform(0.5, 2.0));
    case Group::NonUniformScaling: {
      std::vector<double> s(dim);
      for (auto& v : s) v = rng.uniform(0.5, 2.0);
      return Transform::nonuniform_scaling(std::move(s));
    }
    case Group::Rotation2D:
      return Transform::rotation(rng.uniform(0.0, 2.0 * std::numbers::pi));
  }
  throw InvalidArgument("unknown group");
}

struct GenerateArgs {
  std::string group = "translation";
  std::size_t dim = 1;
  std::size_t n = 0;
  std::size_t m = 0;
  std::string noise = "uniform:1";
  std::uint64_t seed = 0;
  std::string truth;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  sim::ScenarioConfig cfg;
  cfg.group = parse_group(a.group);
  cfg.dim = a.dim;
  cfg.n_ideal = a.n;
  cfg.m_noise = a.m;
  cfg.noise = sim::NoiseModel::parse(a.noise);
  cfg.truth = a.truth.empty() ? default_truth(cfg.group, a.dim, a.seed)
                              : Transform(cfg.group, a.dim, parse_doubles(a.truth));
  cfg.master_seed = a.seed;
  const auto gen = sim::generate_experiment(cfg);
  const auto j = io::to_json(gen.experiment, io::TruthMetadata{gen.truth, gen.n_ideal});
  emit(a.out, j.dump(2) + "\n");
  return kExitOk;
}

struct EstimateArgs {
  std::string in;
  std::string group = "translation";
  std::string family = "lp:0.1";
  bool anneal = false;
  std::string schedule;
  std::size_t stop_stable = 2;
  std::string refine = "auto";
  double pos_tol = 1e-9;
  std::string out;
};

int cmd_estimate(const EstimateArgs& a) {
  const Group group = parse_group(a.group);
  const auto file = io::read_experiment(a.in);
  const Experiment exp = sanitize(file.experiment, group);
  const PenaltyFamily family = PenaltyFamily::parse(a.family);

  EstimateConfig ecfg;
  ecfg.pos_tol = a.pos_tol;
  if (a.refine == "on") {
    ecfg.refine.enabled = true;
  } else if (a.refine == "off") {
    ecfg.refine.enabled = false;
  } else if (a.refine != "auto") {
    throw InvalidArgument("--refine must be on, off or auto");
  }

  nlohmann::json j;
  EstimationResult res = [&] {
    if (std::holds_alternative<L0Penalty>(family.variant())) {
      return estimate_l0(exp, group, std::get<L0Penalty>(family.variant()).tol);
    }
    if (a.anneal) {
      AnnealSchedule sched = AnnealSchedule::default_schedule();
      if (!a.schedule.empty()) sched.p_values = parse_doubles(a.schedule);
      sched.stop_stable = a.stop_stable;
      AnnealConfig acfg;
      acfg.estimate = ecfg;
      acfg.family = family;
      auto ar = anneal_p(exp, group, sched, acfg);
      j["anneal"] = {{"p_visited", ar.p_visited},
                     {"final_p", ar.final_p},
                     {"matches_l0", ar.matches_l0},
                     {"l0_pos_size", ar.l0_pos_size}};
      return ar.result;
    }
    return estimate(exp, group, family, ecfg);
  }();

  j["group"] = std::string(to_string(group));
  j["family"] = family.to_string();
  j["params"] = res.best.params();
  j["objective"] = res.objective;
  j["pos_size"] = res.pos_size;
  j["n_pairs"] = exp.size();
  j["candidates_evaluated"] = res.candidates_evaluated;
  j["refinement_steps"] = res.refinement_steps;
  j["kernel"] = std::string(kernels::to_string(kernels::active_isa()));
  emit(a.out, j.dump(2) + "\n");
  return kExitOk;
}

struct BoundsArgs {
  std::string table = "a";
  double target = 0.999;
  std::size_t M = 1000;
  double a = 0.643;
  int precision = -1;
  std::string out;
};

int cmd_bounds(const BoundsArgs& b) {
  std::ostringstream os;
  os << std::fixed;
  if (b.table == "a") {
    os << std::setprecision(b.precision < 0 ? 3 : b.precision) << "M,a\n";
    for (std::size_t M = 100; M <= 1000; M += 100) {
      os << M << ',' << bounds::min_confidence_exponent(M, b.target) << '\n';
    }
  } else if (b.table == "breakdown") {
    os << std::setprecision(b.precision < 0 ? 2 : b.precision) << "p,n_over_M\n";
    for (int step = 10; step >= 1; --step) {
      const double p = 0.05 * step;
      os << std::setprecision(2) << p << ','
         << std::setprecision(b.precision < 0 ? 2 : b.precision)
         << bounds::breakdown_ratio(p, static_cast<double>(b.M), b.a) << '\n';
    }
  } else {
    throw InvalidArgument("--table must be 'a' or 'breakdown'");
  }
  emit(b.out, os.str());
  return kExitOk;
}

struct ProfileArgs {
  std::string group = "translation";
  std::size_t dim = 1;
  std::size_t m = 200;
  std::string p_list = "0.1,0.5";
  std::string ratios = "0.2,0.45";
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  std::string noise = "uniform:1";
  std::string family = "lp:0.5";
  std::string truth;
  std::size_t threads = 0;
  std::string out;
  std::string jsonl;
};

int cmd_profile(const ProfileArgs& a) {
  sim::ScenarioConfig base;
  base.group = parse_group(a.group);
  base.dim = a.dim;
  base.m_noise = a.m;
  base.n_ideal = 1;
  base.noise = sim::NoiseModel::parse(a.noise);
  base.family = PenaltyFamily::parse(a.family);
  base.truth = a.truth.empty() ? default_truth(base.group, a.dim, a.seed)
                               : Transform(base.group, a.dim, parse_doubles(a.truth));
  base.master_seed = a.seed;
  const auto prof = sim::breakdown_profile(base, parse_doubles(a.p_list),
                                           parse_doubles(a.ratios), a.trials, a.threads);
  emit(a.out, prof.to_csv());
  if (!a.jsonl.empty()) emit(a.jsonl, prof.to_jsonl());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super-robust Lp transform estimation"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic experiment as JSON");
  g->add_option("--group", gen.group, "translation | uniform-scaling | nonuniform-scaling | rotation");
  g->add_option("--dim", gen.dim, "Point dimension")->check(CLI::PositiveNumber);
  g->add_option("--n", gen.n, "Number of perfect pairs");
  g->add_option("--m", gen.m, "Number of noise pairs");
  g->add_option("--noise", gen.noise, "uniform:<max> | powerlaw:<K>");
  g->add_option("--seed", gen.seed, "Seed");
  g->add_option("--truth", gen.truth, "Comma-separated true parameters (default: drawn from seed)");
  g->add_option("--out", gen.out, "Output path (default stdout)");

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Estimate a transform from an experiment file");
  e->add_option("--in", est.in, "Experiment JSON")->required();
  e->add_option("--group", est.group, "Transformation group");
  e->add_option("--family", est.family, "lp:<p> | l0:<tol> | sr:<p>,<q>,<k>");
  e->add_flag("--anneal", est.anneal, "Anneal p along a decreasing schedule");
  e->add_option("--schedule", est.schedule, "Comma-separated decreasing p values for --anneal");
  e->add_option("--stop-stable", est.stop_stable, "Consecutive agreeing estimates to stop annealing");
  e->add_option("--refine", est.refine, "Grid refinement: auto | on | off");
  e->add_option("--pos-tol", est.pos_tol, "Residual tolerance for POS size");
  e->add_option("--out", est.out, "Output path (default stdout)");

  BoundsArgs bnd;
  auto* b = app.add_subcommand("bounds", "Print robustness-bound tables as CSV");
  b->add_option("--table", bnd.table, "a | breakdown");
  b->add_option("--target", bnd.target, "Confidence target for the a table");
  b->add_option("--M", bnd.M, "Noise count for the breakdown table");
  b->add_option("--a", bnd.a, "Concentration exponent for the breakdown table");
  b->add_option("--precision", bnd.precision, "Decimals for the value column");
  b->add_option("--out", bnd.out, "Output path (default stdout)");

  ProfileArgs prof;
  auto* p = app.add_subcommand("profile", "Sweep recovery rate over p x n/M");
  p->add_option("--group", prof.group, "Transformation group");
  p->add_option("--dim", prof.dim, "Point dimension")->check(CLI::PositiveNumber);
  p->add_option("--m", prof.m, "Noise pairs per experiment");
  p->add_option("--p-list", prof.p_list, "Comma-separated p values");
  p->add_option("--ratios", prof.ratios, "Comma-separated inlier ratios n/M");
  p->add_option("--trials", prof.trials, "Trials per cell")->check(CLI::PositiveNumber);
  p->add_option("--seed", prof.seed, "Master seed");
  p->add_option("--noise", prof.noise, "uniform:<max> | powerlaw:<K>");
  p->add_option("--family", prof.family, "Penalty family; its p is replaced per row");
  p->add_option("--truth", prof.truth, "Comma-separated true parameters");
  p->add_option("--threads", prof.threads, "Worker threads (0 = hardware)");
  p->add_option("--out", prof.out, "CSV output path (default stdout)");
  p->add_option("--jsonl", prof.jsonl, "Write per-trial records as JSONL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_generate(gen);
    if (e->parsed()) return cmd_estimate(est);
    if (b->parsed()) return cmd_bounds(bnd);
    if (p->parsed()) return cmd_profile(prof);
  } catch (const DegenerateExperiment& err) {
    std::cerr << "degenerate experiment: " << err.what() << '\n';
    return kExitDegenerate;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
