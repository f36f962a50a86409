#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace rhcsf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised for inconsistent dimensions, invalid regions and bad parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NARX structure: channel counts, dynamic order and sampling time.
///
/// The regression vector stacks, channel by channel, the last `order` inputs
/// followed by the last `order` outputs, giving p = order * (n_u + n_y).
struct NarxConfig {
  int n_u = 1;
  int n_y = 1;
  int order = 1;
  double sample_time = 1.0;

  [[nodiscard]] int regressor_dim() const noexcept { return order * (n_u + n_y); }
  void validate() const;

  friend bool operator==(const NarxConfig&, const NarxConfig&) = default;
};

/// Axis-aligned box [lower, upper].
class Region {
 public:
  Region() = default;
  Region(Vector lower, Vector upper);

  static Region unit(int dim) { return box(dim, 0.0, 1.0); }
  static Region box(int dim, double lower, double upper);

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(lower_.size()); }
  [[nodiscard]] const Vector& lower() const noexcept { return lower_; }
  [[nodiscard]] const Vector& upper() const noexcept { return upper_; }
  [[nodiscard]] Vector extent() const { return upper_ - lower_; }
  [[nodiscard]] Vector center() const { return 0.5 * (lower_ + upper_); }

  template <typename Derived>
  [[nodiscard]] bool contains(const Eigen::MatrixBase<Derived>& v) const {
    if (v.size() != lower_.size()) return false;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (!(lower_[i] <= v[i] && v[i] <= upper_[i])) return false;
    return true;
  }

  /// Clamp a point onto the box.
  template <typename Derived>
  void project(Eigen::MatrixBase<Derived>& v) const {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      v[i] = std::min(std::max(v[i], lower_[i]), upper_[i]);
  }

  /// Cartesian product of this box with `other` (this box's axes first).
  [[nodiscard]] Region concat(const Region& other) const;

 private:
  Vector lower_;
  Vector upper_;
};

/// Affine map of a box onto the unit cube, applied per axis.
class UnitScaling {
 public:
  UnitScaling() = default;
  explicit UnitScaling(const Region& box);

  static UnitScaling identity(int dim);

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(offset_.size()); }
  [[nodiscard]] const Vector& offset() const noexcept { return offset_; }
  [[nodiscard]] const Vector& scale() const noexcept { return scale_; }

  /// Map every row of `points` to unit coordinates.
  [[nodiscard]] Matrix apply(const Matrix& points) const;
  [[nodiscard]] Vector apply(const Vector& point) const;

 private:
  Vector offset_;
  Vector scale_;  // 1 / extent
};

enum class Origin { measured, predicted };

[[nodiscard]] const char* to_string(Origin origin) noexcept;

/// Time-indexed record of applied inputs and outputs.
///
/// Row j (1-based in the math, 0-based in storage) holds u(j) and y(j),
/// where y(j) is the output produced by the regressor x(j) built from
/// samples strictly before j.
struct Dataset {
  Matrix inputs;   // N x n_u
  Matrix outputs;  // N x n_y
  Origin origin = Origin::measured;

  [[nodiscard]] Eigen::Index rows() const noexcept { return inputs.rows(); }
  void validate(const NarxConfig& config) const;
  void append(const Vector& u, const Vector& y);
};

/// Regressor x(1): the lagged samples u(0..1-m) and y(0..1-m) that precede the data.
struct InitialState {
  Vector x0;

  /// Every lagged sample set to `value`.
  static InitialState constant(const NarxConfig& config, double value);
  void validate(const NarxConfig& config) const;
};

/// Regressor x(t) for t >= 1 (1-based) given inputs/outputs that cover at
/// least rows 1..t-1; earlier samples come from `init`.
///
/// `inputs` and `outputs` may hold more rows than needed; only rows < t are read.
[[nodiscard]] Vector regressor_at(const NarxConfig& config, const Matrix& inputs, const Matrix& outputs,
                                  const InitialState& init, Eigen::Index t);

/// Training regressors: row j is x(j) = [u(j-1)..u(j-m), y(j-1)..y(j-m)], j = 1..N.
[[nodiscard]] Matrix build_regressors(const NarxConfig& config, const Dataset& dataset, const InitialState& init);

/// Regressor-space distribution: row j is x(j+1) = [u(j)..u(j-m+1), y(j)..y(j-m+1)], j = 1..N.
///
/// This is the point set the space-filling criterion and the metrics look at;
/// every applied input appears in exactly one row.
[[nodiscard]] Matrix regressor_space(const NarxConfig& config, const Dataset& dataset, const InitialState& init);

/// Stack the rows of `a` on top of the rows of `b`.
[[nodiscard]] Matrix vstack(const Matrix& a, const Matrix& b);

void require(bool condition, const std::string& message);

}  // namespace rhcsf
