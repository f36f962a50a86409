#pragma once

#include "rhcsf/core.hpp"

#include <functional>
#include <stdexcept>
#include <string>

namespace rhcsf {

class SimulationDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Static input nonlinearity of the benchmark plant; maps [0,1] onto [0,1].
[[nodiscard]] double hammerstein_nonlinearity(double x);

/// y(k) = 0.2 g(u(k-1)) + 0.8 y(k-1)
[[nodiscard]] double hammerstein_step(double u_prev, double y_prev);

/// Ground-truth one-step map from a regressor row to the next output.
struct Plant {
  std::string name;
  NarxConfig config;
  std::function<Vector(const Vector& regressor)> step;
};

/// First-order SISO Hammerstein benchmark.
[[nodiscard]] Plant hammerstein_plant(double sample_time = 1.0);

/// Plant registry lookup; throws ConfigError for unknown names.
[[nodiscard]] Plant make_plant(const std::string& name, double sample_time);

/// Roll the plant forward over `inputs` (N x n_u). Output row j is step(x(j)).
[[nodiscard]] Dataset simulate(const Plant& plant, const Matrix& inputs, const InitialState& init);

}  // namespace rhcsf
