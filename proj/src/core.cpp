#include "rhcsf/core.hpp"

#include <cmath>

namespace rhcsf {

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

void NarxConfig::validate() const {
  require(n_u >= 1, "n_u must be >= 1");
  require(n_y >= 1, "n_y must be >= 1");
  require(order >= 1, "order must be >= 1");
  require(sample_time > 0.0 && std::isfinite(sample_time), "sample_time must be positive");
}

Region::Region(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  require(lower_.size() == upper_.size(), "region bounds differ in dimension");
  require(lower_.size() >= 1, "region must have at least one axis");
  for (Eigen::Index i = 0; i < lower_.size(); ++i)
    require(std::isfinite(lower_[i]) && std::isfinite(upper_[i]) && lower_[i] < upper_[i],
            "region axis " + std::to_string(i) + " needs lower < upper");
}

Region Region::box(int dim, double lower, double upper) {
  return Region(Vector::Constant(dim, lower), Vector::Constant(dim, upper));
}

Region Region::concat(const Region& other) const {
  Vector lo(dim() + other.dim());
  Vector hi(dim() + other.dim());
  lo << lower_, other.lower_;
  hi << upper_, other.upper_;
  return Region(std::move(lo), std::move(hi));
}

UnitScaling::UnitScaling(const Region& box)
    : offset_(box.lower()), scale_(box.extent().cwiseInverse()) {}

UnitScaling UnitScaling::identity(int dim) { return UnitScaling(Region::unit(dim)); }

Matrix UnitScaling::apply(const Matrix& points) const {
  require(points.cols() == offset_.size(), "scaling dimension mismatch");
  Matrix out = points;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    out.row(i) = (out.row(i) - offset_.transpose()).cwiseProduct(scale_.transpose());
  return out;
}

Vector UnitScaling::apply(const Vector& point) const {
  require(point.size() == offset_.size(), "scaling dimension mismatch");
  return (point - offset_).cwiseProduct(scale_);
}

const char* to_string(Origin origin) noexcept {
  return origin == Origin::measured ? "measured" : "predicted";
}

void Dataset::validate(const NarxConfig& config) const {
  require(inputs.rows() == outputs.rows(), "dataset inputs and outputs differ in row count");
  require(inputs.cols() == config.n_u, "dataset input width does not match n_u");
  require(outputs.cols() == config.n_y, "dataset output width does not match n_y");
}

void Dataset::append(const Vector& u, const Vector& y) {
  require(inputs.rows() == outputs.rows(), "dataset inputs and outputs differ in row count");
  if (inputs.rows() == 0 && inputs.cols() == 0) inputs.resize(0, u.size());
  if (outputs.rows() == 0 && outputs.cols() == 0) outputs.resize(0, y.size());
  require(u.size() == inputs.cols() && y.size() == outputs.cols(), "appended sample has wrong width");
  inputs.conservativeResize(inputs.rows() + 1, Eigen::NoChange);
  outputs.conservativeResize(outputs.rows() + 1, Eigen::NoChange);
  inputs.row(inputs.rows() - 1) = u.transpose();
  outputs.row(outputs.rows() - 1) = y.transpose();
}

InitialState InitialState::constant(const NarxConfig& config, double value) {
  return {Vector::Constant(config.regressor_dim(), value)};
}

void InitialState::validate(const NarxConfig& config) const {
  require(x0.size() == config.regressor_dim(),
          "initial state has dimension " + std::to_string(x0.size()) + ", expected " +
              std::to_string(config.regressor_dim()));
}

Vector regressor_at(const NarxConfig& config, const Matrix& inputs, const Matrix& outputs,
                    const InitialState& init, Eigen::Index t) {
  const int m = config.order;
  const int in_block = config.n_u * m;
  Vector x(config.regressor_dim());
  // sample s (1-based time) of channel c; s <= 0 reads lag (-s) from the initial state
  for (int c = 0; c < config.n_u; ++c)
    for (int lag = 1; lag <= m; ++lag) {
      const Eigen::Index s = t - lag;
      x[c * m + lag - 1] = s >= 1 ? inputs(s - 1, c) : init.x0[c * m + (-s)];
    }
  for (int c = 0; c < config.n_y; ++c)
    for (int lag = 1; lag <= m; ++lag) {
      const Eigen::Index s = t - lag;
      x[in_block + c * m + lag - 1] = s >= 1 ? outputs(s - 1, c) : init.x0[in_block + c * m + (-s)];
    }
  return x;
}

Matrix build_regressors(const NarxConfig& config, const Dataset& dataset, const InitialState& init) {
  config.validate();
  dataset.validate(config);
  init.validate(config);
  require(dataset.rows() >= 1, "dataset must have at least one row");
  Matrix x(dataset.rows(), config.regressor_dim());
  for (Eigen::Index j = 1; j <= dataset.rows(); ++j)
    x.row(j - 1) = regressor_at(config, dataset.inputs, dataset.outputs, init, j).transpose();
  return x;
}

Matrix regressor_space(const NarxConfig& config, const Dataset& dataset, const InitialState& init) {
  config.validate();
  dataset.validate(config);
  init.validate(config);
  require(dataset.rows() >= 1, "dataset must have at least one row");
  Matrix x(dataset.rows(), config.regressor_dim());
  for (Eigen::Index j = 1; j <= dataset.rows(); ++j)
    x.row(j - 1) = regressor_at(config, dataset.inputs, dataset.outputs, init, j + 1).transpose();
  return x;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  require(a.cols() == b.cols(), "vstack column mismatch");
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

}  // namespace rhcsf
