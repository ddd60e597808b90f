#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lprobust {

/// Raised when an input violates a dimensional or range precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an experiment has no usable observations for a group.
class DegenerateExperiment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point in R^d. Components must be finite.
struct Point {
  std::vector<double> coords;

  Point() = default;
  Point(std::initializer_list<double> c) : coords(c) {}
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}

  std::size_t dim() const { return coords.size(); }
  double operator[](std::size_t k) const { return coords[k]; }
  double& operator[](std::size_t k) { return coords[k]; }
  bool operator==(const Point&) const = default;
};

double norm(std::span<const double> v);

struct ObservationPair {
  Point input;
  Point output;
  bool operator==(const ObservationPair&) const = default;
};

/// An ordered batch of observation pairs with declared dimensions.
class Experiment {
 public:
  Experiment(std::size_t dim_in, std::size_t dim_out,
             std::vector<ObservationPair> pairs);

  std::size_t dim_in() const { return dim_in_; }
  std::size_t dim_out() const { return dim_out_; }
  std::size_t size() const { return pairs_.size(); }
  const std::vector<ObservationPair>& pairs() const { return pairs_; }
  const ObservationPair& operator[](std::size_t i) const { return pairs_[i]; }

  bool operator==(const Experiment&) const = default;

 private:
  std::size_t dim_in_;
  std::size_t dim_out_;
  std::vector<ObservationPair> pairs_;
};

enum class Group { Translation, UniformScaling, NonUniformScaling, Rotation2D };

std::string_view to_string(Group g);
Group parse_group(std::string_view name);

/// Number of parameters a group carries in dimension `dim`.
std::size_t param_count(Group g, std::size_t dim);

/// A member of one of the supported transformation groups.
///
/// Parameters: translation offset (d values), uniform scale s > 0 (1 value),
/// per-axis scales s_k > 0 (d values), rotation angle in [0, 2pi) (1 value,
/// dim 2 only). Angles are normalized on construction.
class Transform {
 public:
  Transform(Group group, std::size_t dim, std::vector<double> params);

  static Transform identity(Group group, std::size_t dim);
  static Transform translation(std::vector<double> offset);
  static Transform uniform_scaling(std::size_t dim, double s);
  static Transform nonuniform_scaling(std::vector<double> scales);
  static Transform rotation(double theta);

  Group group() const { return group_; }
  std::size_t dim() const { return dim_; }
  const std::vector<double>& params() const { return params_; }

  double param_norm() const { return norm(params_); }

  bool operator==(const Transform&) const = default;

 private:
  Group group_;
  std::size_t dim_;
  std::vector<double> params_;
};

/// Euclidean distance between parameter vectors; rotation angles are
/// compared on the circle.
double param_distance(const Transform& a, const Transform& b);

Point apply(const Transform& t, const Point& x);

/// |O - T(I)|, Euclidean.
double residual(const ObservationPair& pair, const Transform& t);

/// Absolute tolerance below which `pair` counts as exactly consistent:
/// 1e-9 * (1 + |O|).
double consistency_tolerance(const ObservationPair& pair);
inline constexpr double kConsistencyRelTol = 1e-9;

bool is_consistent(const ObservationPair& pair, const Transform& t);

/// Residuals at or below this are treated as exactly zero when penalized:
/// 1e-12 * (1 + |O| + |I|). Covers round-off in O - T(I) without flattening
/// the objective around an exact fit.
double snap_tolerance(const ObservationPair& pair);
inline constexpr double kSnapRelTol = 1e-12;

/// Drops pairs whose input cannot identify the group: any zero component for
/// non-uniform scaling, all-zero input for rotation and uniform scaling.
/// Throws DegenerateExperiment when nothing survives.
Experiment sanitize(const Experiment& exp, Group group);

/// Wraps an angle into [0, 2pi).
double wrap_angle(double theta);

}  // namespace lprobust
