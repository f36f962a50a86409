#include "rhcsf/process.hpp"

#include <cmath>

namespace rhcsf {

double hammerstein_nonlinearity(double x) {
  static const double kAtan4 = std::atan(4.0);
  return (std::atan(8.0 * x - 4.0) + kAtan4) / (2.0 * kAtan4);
}

double hammerstein_step(double u_prev, double y_prev) {
  return 0.2 * hammerstein_nonlinearity(u_prev) + 0.8 * y_prev;
}

Plant hammerstein_plant(double sample_time) {
  NarxConfig config{1, 1, 1, sample_time};
  config.validate();
  return {"hammerstein", config, [](const Vector& x) {
            Vector y(1);
            y[0] = hammerstein_step(x[0], x[1]);
            return y;
          }};
}

Plant make_plant(const std::string& name, double sample_time) {
  if (name == "hammerstein") return hammerstein_plant(sample_time);
  throw ConfigError("unknown plant '" + name + "'");
}

Dataset simulate(const Plant& plant, const Matrix& inputs, const InitialState& init) {
  const NarxConfig& cfg = plant.config;
  cfg.validate();
  init.validate(cfg);
  require(inputs.rows() >= 1, "simulate needs at least one input sample");
  require(inputs.cols() == cfg.n_u, "input width does not match plant n_u");

  Dataset data;
  data.origin = Origin::measured;
  data.inputs = inputs;
  data.outputs = Matrix::Zero(inputs.rows(), cfg.n_y);
  for (Eigen::Index j = 1; j <= inputs.rows(); ++j) {
    const Vector y = plant.step(regressor_at(cfg, data.inputs, data.outputs, init, j));
    if (y.size() != cfg.n_y) throw ConfigError("plant step returned wrong output width");
    if (!y.allFinite())
      throw SimulationDiverged(plant.name + " produced a non-finite output at step " + std::to_string(j));
    data.outputs.row(j - 1) = y.transpose();
  }
  return data;
}

}  // namespace rhcsf
