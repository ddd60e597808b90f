#include "lprobust/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lprobust {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (expected " +
                          std::to_string(expected) + ", got " +
                          std::to_string(got) + ")");
  }
}

}  // namespace

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Experiment::Experiment(std::size_t dim_in, std::size_t dim_out,
                       std::vector<ObservationPair> pairs)
    : dim_in_(dim_in), dim_out_(dim_out), pairs_(std::move(pairs)) {
  if (dim_in_ == 0 || dim_out_ == 0) {
    throw InvalidArgument("experiment dimensions must be positive");
  }
  if (pairs_.empty()) throw DegenerateExperiment("experiment has no pairs");
  for (const auto& pr : pairs_) {
    require_dim(dim_in_, pr.input.dim(), "experiment input");
    require_dim(dim_out_, pr.output.dim(), "experiment output");
    for (double c : pr.input.coords) {
      if (!std::isfinite(c)) throw InvalidArgument("non-finite input component");
    }
    for (double c : pr.output.coords) {
      if (!std::isfinite(c)) throw InvalidArgument("non-finite output component");
    }
  }
}

std::string_view to_string(Group g) {
  switch (g) {
    case Group::Translation: return "translation";
    case Group::UniformScaling: return "uniform-scaling";
    case Group::NonUniformScaling: return "nonuniform-scaling";
    case Group::Rotation2D: return "rotation";
  }
  return "?";
}

Group parse_group(std::string_view name) {
  if (name == "translation") return Group::Translation;
  if (name == "uniform-scaling" || name == "scaling") return Group::UniformScaling;
  if (name == "nonuniform-scaling") return Group::NonUniformScaling;
  if (name == "rotation" || name == "rotation2d") return Group::Rotation2D;
  throw InvalidArgument("unknown group '" + std::string(name) + "'");
}

std::size_t param_count(Group g, std::size_t dim) {
  switch (g) {
    case Group::Translation:
    case Group::NonUniformScaling: return dim;
    case Group::UniformScaling:
    case Group::Rotation2D: return 1;
  }
  return 0;
}

double wrap_angle(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative value can land exactly on 2pi after the add.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

Transform::Transform(Group group, std::size_t dim, std::vector<double> params)
    : group_(group), dim_(dim), params_(std::move(params)) {
  if (dim_ == 0) throw InvalidArgument("transform dimension must be positive");
  if (group_ == Group::Rotation2D && dim_ != 2) {
    throw InvalidArgument("rotation is only defined for dimension 2");
  }
  require_dim(param_count(group_, dim_), params_.size(), "transform parameters");
  for (double v : params_) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite transform parameter");
  }
  if (group_ == Group::UniformScaling || group_ == Group::NonUniformScaling) {
    for (double s : params_) {
      if (!(s > 0.0)) throw InvalidArgument("scale factors must be positive");
    }
  }
  if (group_ == Group::Rotation2D) params_[0] = wrap_angle(params_[0]);
}

Transform Transform::identity(Group group, std::size_t dim) {
  switch (group) {
    case Group::Translation: return Transform(group, dim, std::vector<double>(dim, 0.0));
    case Group::UniformScaling: return Transform(group, dim, {1.0});
    case Group::NonUniformScaling: return Transform(group, dim, std::vector<double>(dim, 1.0));
    case Group::Rotation2D: return Transform(group, dim, {0.0});
  }
  throw InvalidArgument("unknown group");
}

Transform Transform::translation(std::vector<double> offset) {
  const auto d = offset.size();
  return Transform(Group::Translation, d, std::move(offset));
}

Transform Transform::uniform_scaling(std::size_t dim, double s) {
  return Transform(Group::UniformScaling, dim, {s});
}

Transform Transform::nonuniform_scaling(std::vector<double> scales) {
  const auto d = scales.size();
  return Transform(Group::NonUniformScaling, d, std::move(scales));
}

Transform Transform::rotation(double theta) {
  return Transform(Group::Rotation2D, 2, {theta});
}

double param_distance(const Transform& a, const Transform& b) {
  if (a.group() != b.group() || a.dim() != b.dim()) {
    throw InvalidArgument("param_distance: transforms from different groups");
  }
  if (a.group() == Group::Rotation2D) {
    const double d = std::abs(a.params()[0] - b.params()[0]);
    return std::min(d, kTwoPi - d);
  }
  double s = 0.0;
  for (std::size_t k = 0; k < a.params().size(); ++k) {
    const double d = a.params()[k] - b.params()[k];
    s += d * d;
  }
  return std::sqrt(s);
}

Point apply(const Transform& t, const Point& x) {
  require_dim(t.dim(), x.dim(), "apply");
  const auto& p = t.params();
  Point y = x;
  switch (t.group()) {
    case Group::Translation:
      for (std::size_t k = 0; k < y.dim(); ++k) y[k] += p[k];
      break;
    case Group::UniformScaling:
      for (auto& c : y.coords) c *= p[0];
      break;
    case Group::NonUniformScaling:
      for (std::size_t k = 0; k < y.dim(); ++k) y[k] *= p[k];
      break;
    case Group::Rotation2D: {
      const double c = std::cos(p[0]);
      const double s = std::sin(p[0]);
      y[0] = c * x[0] - s * x[1];
      y[1] = s * x[0] + c * x[1];
      break;
    }
  }
  return y;
}

double residual(const ObservationPair& pair, const Transform& t) {
  require_dim(pair.output.dim(), pair.input.dim(), "residual");
  const Point predicted = apply(t, pair.input);
  double s = 0.0;
  for (std::size_t k = 0; k < predicted.dim(); ++k) {
    const double d = pair.output[k] - predicted[k];
    s += d * d;
  }
  return std::sqrt(s);
}

double consistency_tolerance(const ObservationPair& pair) {
  return kConsistencyRelTol * (1.0 + norm(pair.output.coords));
}

bool is_consistent(const ObservationPair& pair, const Transform& t) {
  return residual(pair, t) <= consistency_tolerance(pair);
}

double snap_tolerance(const ObservationPair& pair) {
  return kSnapRelTol * (1.0 + norm(pair.output.coords) + norm(pair.input.coords));
}

Experiment sanitize(const Experiment& exp, Group group) {
  std::vector<ObservationPair> kept;
  kept.reserve(exp.size());
  for (const auto& pr : exp.pairs()) {
    const auto& in = pr.input.coords;
    bool keep = true;
    switch (group) {
      case Group::Translation: break;
      case Group::NonUniformScaling:
        for (double c : in) keep = keep && c != 0.0;
        break;
      case Group::UniformScaling:
      case Group::Rotation2D: {
        bool any = false;
        for (double c : in) any = any || c != 0.0;
        keep = any;
        break;
      }
    }
    if (keep) kept.push_back(pr);
  }
  if (kept.empty()) {
    throw DegenerateExperiment("no observations survive sanitization for group " +
                               std::string(to_string(group)));
  }
  return Experiment(exp.dim_in(), exp.dim_out(), std::move(kept));
}

}  // namespace lprobust
