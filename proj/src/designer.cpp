#include "rhcsf/designer.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace rhcsf {

const char* to_string(DesignMode mode) noexcept {
  return mode == DesignMode::offline_fixed ? "offline-fixed" : "online-adaptive";
}

DesignMode parse_design_mode(const std::string& text) {
  if (text == "offline-fixed") return DesignMode::offline_fixed;
  if (text == "online-adaptive") return DesignMode::online_adaptive;
  throw ConfigError("unknown design mode '" + text + "'");
}

void DesignerConfig::validate() const {
  require(length >= 1, "signal length must be >= 1");
  require(horizon >= 1, "prediction horizon must be >= 1");
  require(restarts >= 1, "restarts must be >= 1");
  require(max_grad_steps >= 0, "max_grad_steps must be >= 0");
  require(state_penalty >= 0.0, "state penalty weight must be >= 0");
  require(rel_tol >= 0.0, "relative tolerance must be >= 0");
  require(lolimot.max_models >= 1, "max_models must be >= 1");
  require(lolimot.sigma_factor > 0.0, "sigma_factor must be positive");
}

void DesignProblem::validate() const {
  narx.validate();
  const int p = narx.regressor_dim();
  require(input_region.dim() == narx.n_u, "input region dimension must equal n_u");
  require(state_region.dim() == p, "state region dimension must equal p");
  require(psi.size() >= 1, "supporting set is empty");
  require(psi.dim() == p, "supporting set dimension must equal p");
  init.validate(narx);
}

nlohmann::json to_json(const DesignerConfig& config) {
  return {{"length", config.length},
          {"horizon", config.horizon},
          {"mode", to_string(config.mode)},
          {"restarts", config.restarts},
          {"max_grad_steps", config.max_grad_steps},
          {"rel_tol", config.rel_tol},
          {"state_penalty", config.state_penalty},
          {"seed", config.seed},
          {"random_start", config.random_start == RandomStart::uniform ? "uniform" : "piecewise-constant"},
          {"lolimot",
           {{"max_models", config.lolimot.max_models},
            {"sigma_factor", config.lolimot.sigma_factor},
            {"exact_jacobian", config.lolimot.exact_jacobian}}}};
}

// ---------------------------------------------------------------------------

namespace {

HorizonObjective evaluate(const HorizonContext& ctx, const Matrix& candidate, bool with_gradient, bool penalized) {
  const DesignProblem& problem = ctx.problem;
  const HorizonRollout roll = rollout_horizon(ctx.surrogate, ctx.past_inputs, ctx.past_outputs, candidate,
                                              problem.init, with_gradient);
  const UnitScaling scaling = problem.scaling();
  const Matrix unit_rows = scaling.apply(roll.rows);
  if (!unit_rows.allFinite()) {
    HorizonObjective out;
    out.value = out.criterion = out.penalty = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  CriterionTerms terms = criterion_terms(unit_rows, problem.psi.points, ctx.cache, with_gradient);

  HorizonObjective out;
  out.criterion = terms.value;
  double penalty = 0.0;
  for (Eigen::Index i = 0; i < unit_rows.rows(); ++i)
    for (Eigen::Index d = 0; d < unit_rows.cols(); ++d) {
      const double v = unit_rows(i, d);
      const double excess = v < 0.0 ? v : (v > 1.0 ? v - 1.0 : 0.0);
      if (excess == 0.0) continue;
      penalty += excess * excess;
      if (with_gradient && penalized) terms.row_gradient(i, d) += 2.0 * ctx.state_penalty * excess;
    }
  out.penalty = penalty;
  out.value = terms.value + (penalized ? ctx.state_penalty * penalty : 0.0);
  if (with_gradient) {
    for (Eigen::Index i = 0; i < terms.row_gradient.rows(); ++i)
      terms.row_gradient.row(i) = terms.row_gradient.row(i).cwiseProduct(scaling.scale().transpose());
    out.gradient = chain_row_gradient(terms.row_gradient, roll.row_jacobians);
  }
  return out;
}

Eigen::Map<const Vector> flat(const Matrix& m) { return {m.data(), m.size()}; }

Matrix unflatten(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

void project_rows(Matrix& candidate, const Region& box) {
  for (Eigen::Index i = 0; i < candidate.rows(); ++i) {
    auto row = candidate.row(i);
    box.project(row);
  }
}

bool rows_inside(const Matrix& candidate, const Region& box) {
  for (Eigen::Index i = 0; i < candidate.rows(); ++i)
    if (!box.contains(candidate.row(i))) return false;
  return true;
}

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 30;

HorizonSolution descend(const HorizonContext& ctx, Matrix x) {
  const Region& box = ctx.problem.input_region;
  const Eigen::Index rows = x.rows();
  const Eigen::Index cols = x.cols();
  const double min_extent = box.extent().minCoeff();

  HorizonSolution sol;
  sol.objective = evaluate(ctx, x, true, true);
  if (!std::isfinite(sol.objective.value)) {
    sol.candidate = std::move(x);
    return sol;
  }
  double step = -1.0;
  for (int it = 0; it < ctx.max_grad_steps; ++it) {
    const Vector& g = sol.objective.gradient;
    const double gmax = g.cwiseAbs().maxCoeff();
    if (!(gmax > 0.0) || !std::isfinite(gmax)) break;
    if (step <= 0.0) step = 0.25 * min_extent / gmax;

    bool accepted = false;
    Matrix trial;
    HorizonObjective trial_obj;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      trial = unflatten(flat(x) - step * g, rows, cols);
      project_rows(trial, box);
      const Vector move = flat(trial) - flat(x);
      if (move.cwiseAbs().maxCoeff() == 0.0) break;  // projected gradient vanished
      trial_obj = evaluate(ctx, trial, false, true);
      if (std::isfinite(trial_obj.value) && trial_obj.value <= sol.objective.value + kArmijo * g.dot(move)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const double previous = sol.objective.value;
    const Vector s_move = flat(trial) - flat(x);
    const Vector g_old = g;
    x = std::move(trial);
    sol.objective = evaluate(ctx, x, true, true);
    ++sol.iterations;
    // Barzilai-Borwein step for the next iteration
    const double sy = s_move.dot(sol.objective.gradient - g_old);
    step = sy > 0.0 ? s_move.squaredNorm() / sy : 2.0 * step;
    const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
    if ((previous - sol.objective.value) / scale < ctx.rel_tol) break;
  }
  sol.candidate = std::move(x);
  return sol;
}

}  // namespace

HorizonObjective horizon_objective(const HorizonContext& context, const Matrix& candidate, bool with_gradient) {
  return evaluate(context, candidate, with_gradient, true);
}

Vector criterion_gradient(const HorizonContext& context, const Matrix& candidate) {
  return evaluate(context, candidate, true, false).gradient;
}

HorizonSolution optimize_horizon(const HorizonContext& context, const std::vector<Matrix>& initial) {
  require(!initial.empty(), "optimize_horizon needs at least one initialization");
  const Region& box = context.problem.input_region;
  for (const Matrix& start : initial) {
    require(start.rows() >= 1 && start.cols() == context.problem.narx.n_u, "initialization has wrong shape");
    require(start.rows() == initial.front().rows(), "initializations differ in horizon length");
    require(rows_inside(start, box), "initialization lies outside the input region");
  }

  HorizonSolution best;
  bool found = false;
  for (std::size_t s = 0; s < initial.size(); ++s) {
    HorizonSolution sol = descend(context, initial[s]);
    if (!std::isfinite(sol.objective.value)) continue;
    if (!found || sol.objective.value < best.objective.value) {
      sol.start_index = s;
      best = std::move(sol);
      found = true;
    }
  }
  if (!found) throw DesignerError("every initialization produced a non-finite objective");
  return best;
}

// ---------------------------------------------------------------------------

DesignRun design(const DesignerConfig& config, const DesignProblem& problem, const SurrogatePtr& prior,
                 const Plant* plant) {
  config.validate();
  problem.validate();
  require(prior != nullptr, "design needs a surrogate");
  require(prior->config() == problem.narx, "surrogate NARX structure does not match the problem");
  const bool online = config.mode == DesignMode::online_adaptive;
  if (online) {
    require(plant != nullptr, "online-adaptive mode requires a plant");
    require(plant->config.n_u == problem.narx.n_u && plant->config.n_y == problem.narx.n_y &&
                plant->config.order == problem.narx.order,
            "plant NARX structure does not match the problem");
  }

  const NarxConfig& cfg = problem.narx;
  const int p = cfg.regressor_dim();
  const UnitScaling scaling = problem.scaling();
  const Matrix& psi = problem.psi.points;
  const Region& ubox = problem.input_region;

  std::mt19937_64 rng(config.seed);
  auto random_sequence = [&] {
    Matrix c(config.horizon, cfg.n_u);
    if (config.random_start == RandomStart::uniform) {
      for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (int ch = 0; ch < cfg.n_u; ++ch)
          c(i, ch) = std::uniform_real_distribution<double>(ubox.lower()[ch], ubox.upper()[ch])(rng);
      return c;
    }
    std::uniform_int_distribution<Eigen::Index> hold(1, config.horizon);
    for (Eigen::Index i = 0; i < c.rows();) {
      const Eigen::Index len = std::min(hold(rng), c.rows() - i);
      for (int ch = 0; ch < cfg.n_u; ++ch) {
        const double level = std::uniform_real_distribution<double>(ubox.lower()[ch], ubox.upper()[ch])(rng);
        c.block(i, ch, len, 1).setConstant(level);
      }
      i += len;
    }
    return c;
  };

  DesignRun run;
  run.config = config;
  run.surrogate_snapshots.push_back({{"step", 0}, {"model", prior->to_json()}});

  SurrogatePtr model = prior;
  Matrix inputs(0, cfg.n_u);
  Matrix outputs(1, cfg.n_y);  // y(1..k)
  Matrix predicted(config.length + 1, cfg.n_y);
  Matrix train_x(1, p);
  Matrix train_y(1, cfg.n_y);
  NnCache cache(psi.rows());
  Matrix previous;
  run.regressors.resize(config.length, p);

  const Vector first_prediction = prior->predict(problem.init.x0);
  predicted.row(0) = first_prediction.transpose();
  if (online) {
    const Vector y = plant->step(problem.init.x0);
    if (!y.allFinite()) throw SimulationDiverged(plant->name + " diverged at step 1");
    outputs.row(0) = y.transpose();
  } else {
    outputs.row(0) = first_prediction.transpose();
  }
  train_x.row(0) = problem.init.x0.transpose();
  train_y.row(0) = outputs.row(0);

  try {
    for (Eigen::Index k = 1; k <= config.length; ++k) {
      std::vector<Matrix> starts;
      starts.reserve(static_cast<std::size_t>(config.restarts));
      if (previous.rows() > 0) {
        Matrix shifted(config.horizon, cfg.n_u);
        if (config.horizon > 1) shifted.topRows(config.horizon - 1) = previous.bottomRows(config.horizon - 1);
        shifted.row(config.horizon - 1) = previous.row(config.horizon - 1);
        starts.push_back(std::move(shifted));
      }
      while (static_cast<int>(starts.size()) < config.restarts) starts.push_back(random_sequence());

      const HorizonContext context{*model, problem, inputs, outputs, cache,
                                   config.state_penalty, config.max_grad_steps, config.rel_tol};
      HorizonSolution sol = optimize_horizon(context, starts);

      inputs.conservativeResize(k, Eigen::NoChange);
      inputs.row(k - 1) = sol.candidate.row(0);
      const Vector row = regressor_at(cfg, inputs, outputs, problem.init, k + 1);
      cache.commit(scaling.apply(row), psi);
      run.regressors.row(k - 1) = row.transpose();
      if (!problem.state_region.contains(row)) ++run.state_violations;
      run.j_trace.push_back(cache.total());

      const Vector yhat = model->predict(row);
      predicted.row(k) = yhat.transpose();
      Vector y = yhat;
      if (online) {
        y = plant->step(row);
        if (!y.allFinite()) throw SimulationDiverged(plant->name + " diverged at step " + std::to_string(k + 1));
        train_x.conservativeResize(k + 1, Eigen::NoChange);
        train_y.conservativeResize(k + 1, Eigen::NoChange);
        train_x.row(k) = row.transpose();
        train_y.row(k) = y.transpose();
        if (train_x.rows() >= p + 1)
          model = std::make_shared<Lolimot>(lolimot_fit(train_x, train_y, cfg, problem.state_region, config.lolimot));
        if (config.snapshot_every > 0 && (k % config.snapshot_every == 0 || k == config.length))
          run.surrogate_snapshots.push_back({{"step", k}, {"model", model->to_json()}});
      }
      outputs.conservativeResize(k + 1, Eigen::NoChange);
      outputs.row(k) = y.transpose();
      previous = std::move(sol.candidate);
    }
  } catch (const std::exception& e) {
    run.aborted = true;
    run.error = e.what();
  }

  const Eigen::Index n = inputs.rows();
  run.inputs = inputs;
  run.regressors.conservativeResize(n, Eigen::NoChange);
  run.predicted_outputs = predicted.topRows(n);
  if (online) run.measured_outputs = outputs.topRows(n);
  if (!online) run.surrogate_snapshots.push_back({{"step", n}, {"model", model->to_json()}});
  return run;
}

}  // namespace rhcsf
