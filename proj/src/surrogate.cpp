#include "rhcsf/surrogate.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace rhcsf {

LtiFirstOrder lti_from_time_constant(double time_constant, double gain, double sample_time) {
  require(time_constant > 0.0, "time constant must be positive");
  require(sample_time > 0.0, "sample time must be positive");
  require(sample_time < time_constant, "sample time must be smaller than the time constant");
  require(std::isfinite(gain), "gain must be finite");
  const double ratio = sample_time / time_constant;
  return {1.0 - ratio, gain * ratio, time_constant, gain, sample_time};
}

LtiSurrogate::LtiSurrogate(LtiFirstOrder params, NarxConfig config) : Surrogate(config), params_(params) {
  config.validate();
  require(config.n_u == 1 && config.n_y == 1, "LTI surrogate is single-input single-output");
  require(params_.a > 0.0 && params_.a < 1.0, "LTI pole must lie in (0, 1)");
}

Vector LtiSurrogate::predict(const Vector& x) const {
  const int m = config().order;
  Vector y(1);
  y[0] = params_.a * x[m] + params_.b * x[0];
  return y;
}

Matrix LtiSurrogate::jacobian(const Vector& x) const {
  const int m = config().order;
  Matrix jac = Matrix::Zero(1, x.size());
  jac(0, 0) = params_.b;
  jac(0, m) = params_.a;
  return jac;
}

nlohmann::json LtiSurrogate::to_json() const {
  return {{"type", "lti_first_order"},   {"a", params_.a},
          {"b", params_.b},              {"time_constant", params_.time_constant},
          {"gain", params_.gain},        {"sample_time", params_.sample_time}};
}

// ---------------------------------------------------------------------------
// LOLIMOT

namespace {

struct Gaussians {
  Matrix centers;  // M x p
  Matrix inv_var;  // M x p, 1 / sigma^2
};

Gaussians make_gaussians(const std::vector<Lolimot::LocalModel>& models, double sigma_factor) {
  const auto count = static_cast<Eigen::Index>(models.size());
  const Eigen::Index p = models.front().lower.size();
  Gaussians g{Matrix(count, p), Matrix(count, p)};
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& lm = models[static_cast<std::size_t>(i)];
    g.centers.row(i) = (0.5 * (lm.lower + lm.upper)).transpose();
    const Vector sigma = sigma_factor * (lm.upper - lm.lower);
    g.inv_var.row(i) = sigma.array().square().inverse().matrix().transpose();
  }
  return g;
}

// log-sum-exp normalization keeps far-away probes finite
Vector normalized_validity(const Matrix& centers, const Matrix& inv_var, const Eigen::Ref<const Vector>& x) {
  const Eigen::Index count = centers.rows();
  Vector log_mu(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    double q = 0.0;
    for (Eigen::Index d = 0; d < x.size(); ++d) {
      const double diff = x[d] - centers(i, d);
      q += diff * diff * inv_var(i, d);
    }
    log_mu[i] = -0.5 * q;
  }
  const double peak = log_mu.maxCoeff();
  Vector phi = (log_mu.array() - peak).exp().matrix();
  return phi / phi.sum();
}

Matrix design_matrix(const Matrix& x) {
  Matrix a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  return a;
}

Matrix weighted_least_squares(const Matrix& a, const Matrix& y, const Vector& w, double ridge) {
  const Vector sw = w.cwiseSqrt();
  const Eigen::MatrixXd aw = sw.asDiagonal() * a;
  const Eigen::MatrixXd yw = sw.asDiagonal() * y;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(aw);
  qr.setThreshold(1e-10);
  if (qr.rank() == a.cols()) return qr.solve(yw);
  // rank-deficient: ridge-regularized normal equations
  Eigen::MatrixXd normal = aw.transpose() * aw;
  normal.diagonal().array() += ridge;
  return normal.ldlt().solve(aw.transpose() * yw);
}

struct FitResult {
  std::vector<Lolimot::LocalModel> models;
  Matrix validity;   // N x M
  Matrix residuals;  // N x n_y
  double sse = 0.0;
};

void fit_local_models(FitResult& fit, const Matrix& design, const Matrix& x, const Matrix& y,
                      const LolimotOptions& options) {
  const Gaussians g = make_gaussians(fit.models, options.sigma_factor);
  const auto count = static_cast<Eigen::Index>(fit.models.size());
  fit.validity.resize(x.rows(), count);
  for (Eigen::Index n = 0; n < x.rows(); ++n) fit.validity.row(n) = normalized_validity(g.centers, g.inv_var, x.row(n).transpose()).transpose();

  Matrix prediction = Matrix::Zero(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < count; ++i) {
    auto& lm = fit.models[static_cast<std::size_t>(i)];
    lm.params = weighted_least_squares(design, y, fit.validity.col(i), options.ridge);
    prediction += fit.validity.col(i).asDiagonal() * (design * lm.params);
  }
  fit.residuals = y - prediction;
  fit.sse = fit.residuals.squaredNorm();
}

Eigen::Index points_inside(const Matrix& x, const Vector& lower, const Vector& upper) {
  Eigen::Index count = 0;
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    bool inside = true;
    for (Eigen::Index d = 0; d < x.cols() && inside; ++d) inside = x(n, d) >= lower[d] && x(n, d) <= upper[d];
    count += inside ? 1 : 0;
  }
  return count;
}

}  // namespace

Lolimot::Lolimot(NarxConfig config, Region domain, LolimotOptions options, std::vector<LocalModel> models)
    : Surrogate(config), domain_(std::move(domain)), options_(options), models_(std::move(models)) {
  config.validate();
  require(domain_.dim() == config.regressor_dim(), "LOLIMOT domain dimension must equal p");
  require(!models_.empty(), "LOLIMOT needs at least one local model");
  require(options_.sigma_factor > 0.0, "sigma_factor must be positive");
  for (const auto& lm : models_)
    require(lm.params.rows() == config.regressor_dim() + 1 && lm.params.cols() == config.n_y,
            "local model parameter shape must be (p+1) x n_y");
  Gaussians g = make_gaussians(models_, options_.sigma_factor);
  centers_ = std::move(g.centers);
  inv_var_ = std::move(g.inv_var);
}

Vector Lolimot::validity(const Vector& x) const {
  require(x.size() == config().regressor_dim(), "regressor dimension mismatch");
  return normalized_validity(centers_, inv_var_, x);
}

Vector Lolimot::predict(const Vector& x) const {
  const Vector phi = validity(x);
  Vector y = Vector::Zero(config().n_y);
  for (std::size_t i = 0; i < models_.size(); ++i) {
    const Matrix& w = models_[i].params;
    y += phi[static_cast<Eigen::Index>(i)] * (w.row(0).transpose() + w.bottomRows(x.size()).transpose() * x);
  }
  return y;
}

Matrix Lolimot::jacobian(const Vector& x) const {
  const Eigen::Index p = x.size();
  const Vector phi = validity(x);
  Matrix jac = Matrix::Zero(config().n_y, p);
  for (std::size_t i = 0; i < models_.size(); ++i)
    jac += phi[static_cast<Eigen::Index>(i)] * models_[i].params.bottomRows(p).transpose();
  if (!options_.exact_jacobian) return jac;

  // d phi_i / dx = phi_i (grad log mu_i - sum_j phi_j grad log mu_j)
  const auto count = static_cast<Eigen::Index>(models_.size());
  Matrix grad_log_mu(count, p);
  for (Eigen::Index i = 0; i < count; ++i)
    grad_log_mu.row(i) = -((x.transpose() - centers_.row(i)).cwiseProduct(inv_var_.row(i)));
  const Eigen::RowVectorXd mean_grad = phi.transpose() * grad_log_mu;
  for (Eigen::Index i = 0; i < count; ++i) {
    const Matrix& w = models_[static_cast<std::size_t>(i)].params;
    const Vector local = w.row(0).transpose() + w.bottomRows(p).transpose() * x;
    const Eigen::RowVectorXd dphi = phi[i] * (grad_log_mu.row(i) - mean_grad);
    jac += local * dphi;
  }
  return jac;
}

nlohmann::json Lolimot::to_json() const {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& lm : models_) {
    std::vector<std::vector<double>> params(static_cast<std::size_t>(lm.params.cols()));
    for (Eigen::Index c = 0; c < lm.params.cols(); ++c)
      for (Eigen::Index r = 0; r < lm.params.rows(); ++r) params[static_cast<std::size_t>(c)].push_back(lm.params(r, c));
    models.push_back({{"lower", std::vector<double>(lm.lower.data(), lm.lower.data() + lm.lower.size())},
                      {"upper", std::vector<double>(lm.upper.data(), lm.upper.data() + lm.upper.size())},
                      {"params", params}});
  }
  return {{"type", "lolimot"},
          {"sigma_factor", options_.sigma_factor},
          {"max_models", options_.max_models},
          {"exact_jacobian", options_.exact_jacobian},
          {"rmse_history", rmse_history},
          {"models", models}};
}

Lolimot lolimot_fit(const Matrix& x, const Matrix& y, const NarxConfig& config, const Region& domain,
                    const LolimotOptions& options) {
  config.validate();
  const int p = config.regressor_dim();
  require(x.cols() == p, "regressor width must equal p");
  require(y.cols() == config.n_y, "target width must equal n_y");
  require(x.rows() == y.rows(), "regressors and targets differ in row count");
  require(x.rows() >= p + 1, "LOLIMOT needs at least p+1 samples");
  require(domain.dim() == p, "LOLIMOT domain dimension must equal p");
  require(options.max_models >= 1, "max_models must be >= 1");

  const Matrix design = design_matrix(x);
  const auto rmse = [&](double sse) { return std::sqrt(sse / static_cast<double>(y.size())); };

  FitResult current;
  current.models.push_back({domain.lower(), domain.upper(), Matrix()});
  fit_local_models(current, design, x, y, options);
  std::vector<double> history{rmse(current.sse)};

  while (static_cast<int>(current.models.size()) < options.max_models) {
    const auto count = static_cast<Eigen::Index>(current.models.size());
    const Vector row_loss = current.residuals.rowwise().squaredNorm();
    Vector local_loss(count);
    for (Eigen::Index i = 0; i < count; ++i) local_loss[i] = current.validity.col(i).dot(row_loss);

    // worst partition first; fall through to the next one when no split is admissible
    std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return local_loss[l] > local_loss[r]; });

    bool found = false;
    FitResult best;
    best.sse = std::numeric_limits<double>::infinity();
    for (const Eigen::Index worst : order) {
      const auto& parent = current.models[static_cast<std::size_t>(worst)];
      for (int d = 0; d < p; ++d) {
        const double mid = 0.5 * (parent.lower[d] + parent.upper[d]);
        Lolimot::LocalModel left = parent;
        Lolimot::LocalModel right = parent;
        left.upper[d] = mid;
        right.lower[d] = mid;
        // each half must hold enough samples for its own affine fit
        if (points_inside(x, left.lower, left.upper) < p + 1 || points_inside(x, right.lower, right.upper) < p + 1)
          continue;
        FitResult trial;
        trial.models = current.models;
        trial.models[static_cast<std::size_t>(worst)] = left;
        trial.models.push_back(right);
        fit_local_models(trial, design, x, y, options);
        if (std::isfinite(trial.sse) && trial.sse < best.sse) {
          best = std::move(trial);
          found = true;
        }
      }
      if (found) break;
    }
    if (!found || !(best.sse < current.sse)) break;
    current = std::move(best);
    history.push_back(rmse(current.sse));
  }

  Lolimot model(config, domain, options, std::move(current.models));
  model.rmse_history = std::move(history);
  return model;
}

Lolimot lolimot_fit(const Dataset& data, const NarxConfig& config, const InitialState& init, const Region& domain,
                    const LolimotOptions& options) {
  return lolimot_fit(build_regressors(config, data, init), data.outputs, config, domain, options);
}

Lolimot lolimot_update(const Lolimot& model, const Dataset& data, const InitialState& init) {
  require(data.rows() >= 1, "LOLIMOT update needs data");
  return lolimot_fit(data, model.config(), init, model.domain(), model.options());
}

// ---------------------------------------------------------------------------
// Rollout

HorizonRollout rollout_horizon(const Surrogate& surrogate, const Matrix& past_inputs, const Matrix& past_outputs,
                               const Matrix& candidate, const InitialState& init, bool with_jacobian) {
  const NarxConfig& cfg = surrogate.config();
  const int m = cfg.order;
  const int p = cfg.regressor_dim();
  const Eigen::Index horizon = candidate.rows();
  const Eigen::Index k = past_inputs.rows() + 1;
  require(horizon >= 1, "candidate horizon must be >= 1");
  require(candidate.cols() == cfg.n_u, "candidate width does not match n_u");
  require(past_inputs.rows() == 0 || past_inputs.cols() == cfg.n_u, "history input width does not match n_u");
  require(past_outputs.rows() == k, "history must carry outputs y(1..k)");
  require(past_outputs.cols() == cfg.n_y, "history output width does not match n_y");
  init.validate(cfg);

  Matrix inputs(k - 1 + horizon, cfg.n_u);
  if (k > 1) inputs.topRows(k - 1) = past_inputs;
  inputs.bottomRows(horizon) = candidate;
  Matrix outputs(k + horizon, cfg.n_y);
  outputs.topRows(k) = past_outputs;

  HorizonRollout out;
  out.rows.resize(horizon, p);
  const Eigen::Index vars = horizon * cfg.n_u;
  if (with_jacobian) {
    out.row_jacobians.reserve(static_cast<std::size_t>(horizon));
    out.output_jacobians.reserve(static_cast<std::size_t>(horizon));
  }
  const int in_block = cfg.n_u * m;

  for (Eigen::Index i = 0; i < horizon; ++i) {
    const Eigen::Index t = k + 1 + i;  // row x(t)
    const Vector x = regressor_at(cfg, inputs, outputs, init, t);
    out.rows.row(i) = x.transpose();
    const Vector y = surrogate.predict(x);
    outputs.row(t - 1) = y.transpose();

    if (!with_jacobian) continue;
    Matrix dx = Matrix::Zero(p, vars);
    for (int c = 0; c < cfg.n_u; ++c)
      for (int lag = 1; lag <= m; ++lag) {
        const Eigen::Index s = t - lag;  // input time index
        if (s >= k) dx(c * m + lag - 1, (s - k) * cfg.n_u + c) = 1.0;
      }
    for (int c = 0; c < cfg.n_y; ++c)
      for (int lag = 1; lag <= m; ++lag) {
        const Eigen::Index s = t - lag;  // output time index; yhat(s) for s > k depends on the candidate
        if (s > k) dx.row(in_block + c * m + lag - 1) = out.output_jacobians[static_cast<std::size_t>(s - k - 1)].row(c);
      }
    out.output_jacobians.push_back(surrogate.jacobian(x) * dx);
    out.row_jacobians.push_back(std::move(dx));
  }
  out.outputs = outputs.bottomRows(horizon + 1);
  return out;
}

Matrix predict_outputs(const Surrogate& surrogate, const Matrix& inputs, const InitialState& init) {
  const NarxConfig& cfg = surrogate.config();
  init.validate(cfg);
  require(inputs.rows() == 0 || inputs.cols() == cfg.n_u, "input width does not match n_u");
  Matrix outputs = Matrix::Zero(inputs.rows() + 1, cfg.n_y);
  for (Eigen::Index t = 1; t <= inputs.rows() + 1; ++t)
    outputs.row(t - 1) = surrogate.predict(regressor_at(cfg, inputs, outputs, init, t)).transpose();
  return outputs;
}

Matrix rollout(const Surrogate& surrogate, const Matrix& committed_inputs, const Matrix& candidate,
               const InitialState& init) {
  const NarxConfig& cfg = surrogate.config();
  const Matrix history = predict_outputs(surrogate, committed_inputs, init);
  const HorizonRollout horizon = rollout_horizon(surrogate, committed_inputs, history, candidate, init, false);
  const Eigen::Index committed = committed_inputs.rows();
  Matrix rows(committed, cfg.regressor_dim());
  for (Eigen::Index t = 2; t <= committed + 1; ++t)
    rows.row(t - 2) = regressor_at(cfg, committed_inputs, history, init, t).transpose();
  return vstack(rows, horizon.rows);
}

HorizonRollout rollout_jacobian(const Surrogate& surrogate, const Matrix& committed_inputs, const Matrix& candidate,
                                const InitialState& init) {
  const Matrix history = predict_outputs(surrogate, committed_inputs, init);
  return rollout_horizon(surrogate, committed_inputs, history, candidate, init, true);
}

}  // namespace rhcsf
