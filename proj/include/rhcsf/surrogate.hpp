#pragma once

#include "rhcsf/core.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <vector>

namespace rhcsf {

/// One-step NARX predictor: regressor row -> next output.
class Surrogate {
 public:
  explicit Surrogate(NarxConfig config) : config_(config) {}
  virtual ~Surrogate() = default;

  [[nodiscard]] const NarxConfig& config() const noexcept { return config_; }

  [[nodiscard]] virtual Vector predict(const Vector& x) const = 0;
  /// n_y x p matrix of d(prediction)/d(regressor).
  [[nodiscard]] virtual Matrix jacobian(const Vector& x) const = 0;
  [[nodiscard]] virtual bool trainable() const noexcept = 0;
  [[nodiscard]] virtual nlohmann::json to_json() const = 0;

 private:
  NarxConfig config_;
};

using SurrogatePtr = std::shared_ptr<const Surrogate>;

/// Discrete first-order lag y(k+1) = a y(k) + b u(k).
struct LtiFirstOrder {
  double a = 0.0;
  double b = 0.0;
  double time_constant = 0.0;
  double gain = 0.0;
  double sample_time = 0.0;
};

/// Forward-Euler discretization: a = 1 - T_s/T, b = K T_s/T.
[[nodiscard]] LtiFirstOrder lti_from_time_constant(double time_constant, double gain, double sample_time);

/// SISO first-order LTI surrogate. Uses only the most recent input and output lag,
/// so it works with any dynamic order.
class LtiSurrogate final : public Surrogate {
 public:
  LtiSurrogate(LtiFirstOrder params, NarxConfig config);

  [[nodiscard]] const LtiFirstOrder& params() const noexcept { return params_; }

  [[nodiscard]] Vector predict(const Vector& x) const override;
  [[nodiscard]] Matrix jacobian(const Vector& x) const override;
  [[nodiscard]] bool trainable() const noexcept override { return false; }
  [[nodiscard]] nlohmann::json to_json() const override;

 private:
  LtiFirstOrder params_;
};

struct LolimotOptions {
  int max_models = 10;
  double sigma_factor = 1.0 / 3.0;
  double ridge = 1e-8;
  /// Include the derivative of the normalized validity functions in jacobian().
  /// When false the validities are treated as constants.
  bool exact_jacobian = true;
};

/// Local linear model tree: axis-orthogonal partitions of a box, normalized
/// Gaussian validity functions and one affine model per partition.
class Lolimot final : public Surrogate {
 public:
  struct LocalModel {
    Vector lower;
    Vector upper;
    Matrix params;  // (p+1) x n_y; row 0 is the offset
  };

  Lolimot(NarxConfig config, Region domain, LolimotOptions options, std::vector<LocalModel> models);

  [[nodiscard]] const Region& domain() const noexcept { return domain_; }
  [[nodiscard]] const LolimotOptions& options() const noexcept { return options_; }
  [[nodiscard]] const std::vector<LocalModel>& models() const noexcept { return models_; }
  [[nodiscard]] std::size_t size() const noexcept { return models_.size(); }

  /// Normalized validity of every local model at `x`; sums to one.
  [[nodiscard]] Vector validity(const Vector& x) const;

  [[nodiscard]] Vector predict(const Vector& x) const override;
  [[nodiscard]] Matrix jacobian(const Vector& x) const override;
  [[nodiscard]] bool trainable() const noexcept override { return true; }
  [[nodiscard]] nlohmann::json to_json() const override;

  /// Training RMSE after each accepted split, starting with the single global model.
  std::vector<double> rmse_history;

 private:
  Region domain_;
  LolimotOptions options_;
  std::vector<LocalModel> models_;
  Matrix centers_;  // M x p
  Matrix inv_var_;  // M x p, 1 / sigma^2
};

/// Fit on explicit regressor rows `x` (N x p) and targets `y` (N x n_y).
[[nodiscard]] Lolimot lolimot_fit(const Matrix& x, const Matrix& y, const NarxConfig& config, const Region& domain,
                                  const LolimotOptions& options = {});

/// Fit on the training regressors of `data`.
[[nodiscard]] Lolimot lolimot_fit(const Dataset& data, const NarxConfig& config, const InitialState& init,
                                  const Region& domain, const LolimotOptions& options = {});

/// Refit from scratch on the full accumulated `data`, keeping the domain and options of `model`.
[[nodiscard]] Lolimot lolimot_update(const Lolimot& model, const Dataset& data, const InitialState& init);

/// Predicted regressors over a candidate horizon together with their
/// derivatives with respect to the candidate inputs.
///
/// Time step k is the first candidate sample. The history holds u(1..k-1)
/// and y(1..k); y(k) is the current output (measured or predicted).
struct HorizonRollout {
  Matrix rows;     // L x p: x(k+1) .. x(k+L)
  Matrix outputs;  // (L+1) x n_y: y(k), yhat(k+1) .. yhat(k+L)
  /// d rows(i) / d candidate, p x (L n_u) each; candidate flattened row-major.
  std::vector<Matrix> row_jacobians;
  /// d yhat(k+1+i) / d candidate, n_y x (L n_u) each, i = 0..L-1.
  std::vector<Matrix> output_jacobians;
};

[[nodiscard]] HorizonRollout rollout_horizon(const Surrogate& surrogate, const Matrix& past_inputs,
                                             const Matrix& past_outputs, const Matrix& candidate,
                                             const InitialState& init, bool with_jacobian);

/// Free-run surrogate outputs yhat(1..n+1) for inputs u(1..n) (n may be 0).
[[nodiscard]] Matrix predict_outputs(const Surrogate& surrogate, const Matrix& inputs, const InitialState& init);

/// Full predicted regressor set X(k): rows x(2) .. x(k+L), (k+L-1) x p.
///
/// The committed part uses the surrogate's own predictions for the
/// committed inputs (offline semantics).
[[nodiscard]] Matrix rollout(const Surrogate& surrogate, const Matrix& committed_inputs, const Matrix& candidate,
                             const InitialState& init);

/// Derivatives of the horizon rows with respect to the candidate (offline semantics).
[[nodiscard]] HorizonRollout rollout_jacobian(const Surrogate& surrogate, const Matrix& committed_inputs,
                                              const Matrix& candidate, const InitialState& init);

}  // namespace rhcsf
