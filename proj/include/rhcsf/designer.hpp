#pragma once

#include "rhcsf/core.hpp"
#include "rhcsf/criterion.hpp"
#include "rhcsf/process.hpp"
#include "rhcsf/sampling.hpp"
#include "rhcsf/surrogate.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rhcsf {

class DesignerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DesignMode { offline_fixed, online_adaptive };

/// How the random multi-start sequences are drawn.
enum class RandomStart {
  uniform,             // i.i.d. uniform samples in the input box
  piecewise_constant,  // uniform levels held for a random number of samples
};

[[nodiscard]] const char* to_string(DesignMode mode) noexcept;
[[nodiscard]] DesignMode parse_design_mode(const std::string& text);

struct DesignerConfig {
  Eigen::Index length = 300;  // N
  Eigen::Index horizon = 20;  // L, in samples
  DesignMode mode = DesignMode::offline_fixed;
  int restarts = 5;  // shifted warm start + (restarts - 1) random sequences
  int max_grad_steps = 50;
  double rel_tol = 1e-6;
  double state_penalty = 1e3;  // weight of the squared hinge on regressor rows outside the state box
  std::uint64_t seed = 0;
  RandomStart random_start = RandomStart::piecewise_constant;
  LolimotOptions lolimot;   // online mode only
  int snapshot_every = 50;  // surrogate snapshots kept every this many steps (online mode)

  void validate() const;
};

/// Geometry shared by all design steps.
///
/// The criterion is evaluated in unit coordinates: every regressor row is
/// mapped through the affine map of the state box onto [0,1]^p, and `psi`
/// is given in those coordinates.
struct DesignProblem {
  NarxConfig narx;
  Region input_region;
  Region state_region;
  SupportingSet psi;
  InitialState init;

  [[nodiscard]] UnitScaling scaling() const { return UnitScaling(state_region); }
  void validate() const;
};

/// Everything optimize_horizon needs at time step k.
struct HorizonContext {
  const Surrogate& surrogate;
  const DesignProblem& problem;
  const Matrix& past_inputs;   // u(1..k-1)
  const Matrix& past_outputs;  // y(1..k)
  const NnCache& cache;        // committed rows, unit coordinates
  double state_penalty = 1e3;
  int max_grad_steps = 50;
  double rel_tol = 1e-6;
};

struct HorizonObjective {
  double value = 0.0;      // criterion + penalty
  double criterion = 0.0;  // J
  double penalty = 0.0;    // unweighted sum of squared violations
  Vector gradient;         // d value / d candidate, row-major flattening
};

/// Penalized objective of one candidate sequence (L x n_u).
[[nodiscard]] HorizonObjective horizon_objective(const HorizonContext& context, const Matrix& candidate,
                                                 bool with_gradient);

/// d J / d candidate for one candidate (the unpenalized criterion).
[[nodiscard]] Vector criterion_gradient(const HorizonContext& context, const Matrix& candidate);

struct HorizonSolution {
  Matrix candidate;
  HorizonObjective objective;
  std::size_t start_index = 0;  // which initialization won
  int iterations = 0;
};

/// Projected gradient descent with backtracking from every initialization;
/// returns the best feasible result. Initializations outside the input box
/// are rejected with ConfigError.
[[nodiscard]] HorizonSolution optimize_horizon(const HorizonContext& context, const std::vector<Matrix>& initial);

struct DesignRun {
  DesignerConfig config;
  Matrix inputs;             // N x n_u
  Matrix predicted_outputs;  // N x n_y: surrogate output yhat(j) the designer saw for each step
  Matrix measured_outputs;   // N x n_y, online mode only
  Matrix regressors;         // N x p: committed rows x(2..N+1) as the designer saw them
  std::vector<double> j_trace;  // criterion over committed rows after each commit
  std::vector<nlohmann::json> surrogate_snapshots;
  Eigen::Index state_violations = 0;  // committed rows outside the state box
  bool aborted = false;
  std::string error;

  [[nodiscard]] Eigen::Index committed() const noexcept { return inputs.rows(); }
};

/// Receding-horizon design loop.
///
/// `prior` is the fixed surrogate in offline mode and the cold-start model in
/// online mode (used until p+1 observations exist, after which a LOLIMOT
/// network is refit on all measured data at every step). `plant` is required
/// in online mode and ignored otherwise.
[[nodiscard]] DesignRun design(const DesignerConfig& config, const DesignProblem& problem, const SurrogatePtr& prior,
                               const Plant* plant);

[[nodiscard]] nlohmann::json to_json(const DesignerConfig& config);

}  // namespace rhcsf
