#include "rhcsf/harness.hpp"

#include "rhcsf/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace rhcsf {
namespace fs = std::filesystem;

const char* to_string(Method method) noexcept {
  switch (method) {
    case Method::proposed_fixed: return "proposed-fixed";
    case Method::proposed_adaptive: return "proposed-adaptive";
    case Method::aprbs: return "aprbs";
    case Method::multisine: return "multisine";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  for (Method m : {Method::proposed_fixed, Method::proposed_adaptive, Method::aprbs, Method::multisine})
    if (text == to_string(m)) return m;
  throw ConfigError("unknown method '" + text + "'");
}

namespace {

const char* to_string(RandomStart s) { return s == RandomStart::uniform ? "uniform" : "piecewise-constant"; }

RandomStart parse_random_start(const std::string& text) {
  if (text == "uniform") return RandomStart::uniform;
  if (text == "piecewise-constant") return RandomStart::piecewise_constant;
  throw ConfigError("unknown random_start '" + text + "'");
}

std::string format(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

Region region_from(const ConfigDocument& doc, const std::string& lower_key, const std::string& upper_key, int dim,
                   const Region& fallback) {
  if (!doc.has(lower_key) && !doc.has(upper_key)) return fallback;
  auto expand = [&](const std::string& key, const Vector& dflt) {
    const std::vector<double> v = doc.numbers(key, std::vector<double>(dflt.data(), dflt.data() + dflt.size()));
    if (v.size() == 1) return Vector::Constant(dim, v.front()).eval();
    if (static_cast<int>(v.size()) != dim)
      throw ConfigError("'" + key + "' needs 1 or " + std::to_string(dim) + " values");
    return Eigen::Map<const Vector>(v.data(), dim).eval();
  };
  return Region(expand(lower_key, fallback.lower()), expand(upper_key, fallback.upper()));
}

}  // namespace

Eigen::Index ExperimentConfig::resolved_horizon() const {
  if (horizon > 0) return horizon;
  return std::max<Eigen::Index>(1, std::lround(4.0 * time_constant / narx.sample_time));
}

Eigen::Index ExperimentConfig::resolved_supporting_points() const {
  return supporting_points > 0 ? supporting_points : default_supporting_count(length);
}

int ExperimentConfig::resolved_harmonics() const {
  return multisine_harmonics > 0 ? multisine_harmonics : std::max(1, static_cast<int>(length / 4));
}

InitialState ExperimentConfig::initial_state() const {
  InitialState init;
  init.x0.resize(narx.regressor_dim());
  const int m = narx.order;
  for (int c = 0; c < narx.n_u; ++c) init.x0.segment(c * m, m).setConstant(initial_input);
  for (int c = 0; c < narx.n_y; ++c) init.x0.segment(narx.n_u * m + c * m, m).setConstant(initial_output);
  return init;
}

DesignerConfig ExperimentConfig::designer(Method method, std::uint64_t seed) const {
  DesignerConfig d;
  d.length = length;
  d.horizon = resolved_horizon();
  d.mode = method == Method::proposed_adaptive ? DesignMode::online_adaptive : DesignMode::offline_fixed;
  d.restarts = restarts;
  d.max_grad_steps = max_grad_steps;
  d.rel_tol = rel_tol;
  d.state_penalty = state_penalty;
  d.seed = seed;
  d.random_start = random_start;
  d.lolimot = lolimot;
  return d;
}

void ExperimentConfig::validate() const {
  narx.validate();
  const int p = narx.regressor_dim();
  require(input_region.dim() == narx.n_u, "input region dimension must equal n_u");
  require(state_region.dim() == p, "state region dimension must equal p");
  require(interest_region.dim() == p, "region of interest dimension must equal p");
  for (int i = 0; i < p; ++i)
    require(state_region.lower()[i] <= interest_region.lower()[i] && interest_region.upper()[i] <= state_region.upper()[i],
            "region of interest must lie inside the state region");
  require(!methods.empty(), "at least one method is required");
  require(length >= 1, "signal length must be >= 1");
  require(replicates >= 1, "replicates must be >= 1");
  require(evaluation_points >= 1, "evaluation_points must be >= 1");
  require(bins_per_axis >= 1, "bins_per_axis must be >= 1");
  require(jobs >= 1, "jobs must be >= 1");
  require(aprbs_min_hold >= narx.sample_time, "APRBS minimum hold time must be >= T_s");
  require(resolved_harmonics() <= length / 2 || length < 2, "multisine harmonics must be <= N/2");
  require(time_constant > narx.sample_time, "surrogate time constant must exceed T_s");
  require(make_plant(plant, narx.sample_time).config == narx, "plant structure does not match the NARX config");
  require(state_region.contains(initial_state().x0), "initial state must lie in the state region");
  designer(Method::proposed_fixed, 0).validate();
}

nlohmann::json ExperimentConfig::to_json() const {
  std::vector<std::string> names;
  for (Method m : methods) names.emplace_back(rhcsf::to_string(m));
  return {
      {"plant", plant},
      {"methods", names},
      {"narx", {{"n_u", narx.n_u}, {"n_y", narx.n_y}, {"order", narx.order}, {"sample_time", narx.sample_time}}},
      {"input_region", rhcsf::to_json(input_region)},
      {"state_region", rhcsf::to_json(state_region)},
      {"interest_region", rhcsf::to_json(interest_region)},
      {"length", length},
      {"horizon", resolved_horizon()},
      {"supporting_points", resolved_supporting_points()},
      {"evaluation_points", evaluation_points},
      {"bins_per_axis", bins_per_axis},
      {"replicates", replicates},
      {"base_seed", base_seed},
      {"initial_input", initial_input},
      {"initial_output", initial_output},
      {"surrogate", {{"time_constant", time_constant}, {"gain", gain}}},
      {"designer",
       {{"restarts", restarts},
        {"max_grad_steps", max_grad_steps},
        {"rel_tol", rel_tol},
        {"state_penalty", state_penalty},
        {"random_start", to_string(random_start)}}},
      {"lolimot",
       {{"max_models", lolimot.max_models},
        {"sigma_factor", lolimot.sigma_factor},
        {"ridge", lolimot.ridge},
        {"exact_jacobian", lolimot.exact_jacobian}}},
      {"aprbs", {{"min_hold_time", aprbs_min_hold}}},
      {"multisine", {{"harmonics", resolved_harmonics()}}},
  };
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(to_json().dump()); }

ExperimentConfig experiment_config_from(const ConfigDocument& doc) {
  static const std::vector<std::string> known = {
      "experiment.plant", "experiment.methods", "experiment.replicates", "experiment.base_seed",
      "experiment.length", "experiment.jobs", "narx.n_u", "narx.n_y", "narx.order", "narx.sample_time",
      "regions.input_lower", "regions.input_upper", "regions.state_lower", "regions.state_upper",
      "regions.interest_lower", "regions.interest_upper", "initial.input", "initial.output",
      "surrogate.time_constant", "surrogate.gain", "designer.horizon", "designer.supporting_points",
      "designer.restarts", "designer.max_grad_steps", "designer.rel_tol", "designer.state_penalty",
      "designer.random_start", "lolimot.max_models", "lolimot.sigma_factor", "lolimot.ridge",
      "lolimot.exact_jacobian", "aprbs.min_hold_time", "multisine.harmonics", "metrics.evaluation_points",
      "metrics.bins_per_axis"};
  for (const auto& [key, value] : doc.values())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");

  ExperimentConfig c;
  c.plant = doc.string("experiment.plant", c.plant);
  if (doc.has("experiment.methods")) {
    c.methods.clear();
    for (const auto& name : doc.strings("experiment.methods", {})) c.methods.push_back(parse_method(name));
  }
  c.replicates = static_cast<int>(doc.integer("experiment.replicates", c.replicates));
  const long long seed = doc.integer("experiment.base_seed", 0);
  require(seed >= 0, "base_seed must be >= 0");
  c.base_seed = static_cast<std::uint64_t>(seed);
  c.length = doc.integer("experiment.length", c.length);
  c.jobs = static_cast<int>(doc.integer("experiment.jobs", c.jobs));

  c.narx.n_u = static_cast<int>(doc.integer("narx.n_u", c.narx.n_u));
  c.narx.n_y = static_cast<int>(doc.integer("narx.n_y", c.narx.n_y));
  c.narx.order = static_cast<int>(doc.integer("narx.order", c.narx.order));
  c.narx.sample_time = doc.number("narx.sample_time", c.narx.sample_time);
  c.narx.validate();
  const int p = c.narx.regressor_dim();
  c.input_region = region_from(doc, "regions.input_lower", "regions.input_upper", c.narx.n_u, Region::unit(c.narx.n_u));
  c.state_region = region_from(doc, "regions.state_lower", "regions.state_upper", p, Region::unit(p));
  c.interest_region = region_from(doc, "regions.interest_lower", "regions.interest_upper", p, c.state_region);

  c.initial_input = doc.number("initial.input", c.initial_input);
  c.initial_output = doc.number("initial.output", c.initial_output);
  c.time_constant = doc.number("surrogate.time_constant", c.time_constant);
  c.gain = doc.number("surrogate.gain", c.gain);

  c.horizon = doc.integer("designer.horizon", c.horizon);
  c.supporting_points = doc.integer("designer.supporting_points", c.supporting_points);
  c.restarts = static_cast<int>(doc.integer("designer.restarts", c.restarts));
  c.max_grad_steps = static_cast<int>(doc.integer("designer.max_grad_steps", c.max_grad_steps));
  c.rel_tol = doc.number("designer.rel_tol", c.rel_tol);
  c.state_penalty = doc.number("designer.state_penalty", c.state_penalty);
  c.random_start = parse_random_start(doc.string("designer.random_start", to_string(c.random_start)));

  c.lolimot.max_models = static_cast<int>(doc.integer("lolimot.max_models", c.lolimot.max_models));
  c.lolimot.sigma_factor = doc.number("lolimot.sigma_factor", c.lolimot.sigma_factor);
  c.lolimot.ridge = doc.number("lolimot.ridge", c.lolimot.ridge);
  c.lolimot.exact_jacobian = doc.boolean("lolimot.exact_jacobian", c.lolimot.exact_jacobian);

  c.aprbs_min_hold = doc.number("aprbs.min_hold_time", c.aprbs_min_hold);
  c.multisine_harmonics = static_cast<int>(doc.integer("multisine.harmonics", c.multisine_harmonics));
  c.evaluation_points = doc.integer("metrics.evaluation_points", c.evaluation_points);
  c.bins_per_axis = static_cast<int>(doc.integer("metrics.bins_per_axis", c.bins_per_axis));
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  return experiment_config_from(ConfigDocument::load(path));
}

ExperimentContext make_context(const ExperimentConfig& config) {
  config.validate();
  ExperimentContext ctx{config, make_plant(config.plant, config.narx.sample_time), UnitScaling(config.state_region),
                        {}, {}, {}, nullptr, {}};
  ctx.unit_interest = Region(ctx.scaling.apply(config.interest_region.lower()),
                             ctx.scaling.apply(config.interest_region.upper()));
  ctx.psi.points = ctx.scaling.apply(supporting_set(config.interest_region, config.resolved_supporting_points()).points);
  ctx.eval = evaluation_set(ctx.unit_interest, config.evaluation_points);
  if (config.narx.n_u == 1 && config.narx.n_y == 1)
    ctx.prior = std::make_shared<LtiSurrogate>(
        lti_from_time_constant(config.time_constant, config.gain, config.narx.sample_time), config.narx);
  ctx.problem = DesignProblem{config.narx, config.input_region, config.state_region, ctx.psi, config.initial_state()};
  return ctx;
}

void score_signal(const ExperimentContext& context, ReplicateResult& result) {
  const ExperimentConfig& cfg = context.config;
  const InitialState init = cfg.initial_state();
  result.inputs_in_region = true;
  for (Eigen::Index k = 0; k < result.inputs.rows(); ++k)
    if (!cfg.input_region.contains(result.inputs.row(k))) result.inputs_in_region = false;
  const Dataset data = simulate(context.plant, result.inputs, init);
  result.outputs = data.outputs;
  const Matrix x = regressor_space(cfg.narx, data, init);
  result.state_violations = 0;
  for (Eigen::Index k = 0; k < x.rows(); ++k)
    if (!cfg.state_region.contains(x.row(k))) ++result.state_violations;
  const Matrix unit = context.scaling.apply(x);
  result.radius_progress = radius_progress(unit, context.eval);
  result.jsd_progress = jsd_progress(unit, context.unit_interest, cfg.bins_per_axis);
  result.radius = result.radius_progress.back();
  result.jsd = result.jsd_progress.back();
}

ReplicateResult run_replicate(const ExperimentContext& context, Method method, int replicate) {
  const ExperimentConfig& cfg = context.config;
  ReplicateResult result;
  result.method = method;
  result.replicate = replicate;
  result.seed = cfg.base_seed + static_cast<std::uint64_t>(replicate);
  try {
    switch (method) {
      case Method::proposed_fixed:
      case Method::proposed_adaptive: {
        if (!context.prior) throw ConfigError("the LTI surrogate needs a SISO configuration");
        const DesignerConfig dc = cfg.designer(method, result.seed);
        DesignRun run = design(dc, context.problem, context.prior, &context.plant);
        if (run.aborted) throw DesignerError(run.error);
        result.inputs = run.inputs;
        result.predicted = run.predicted_outputs;
        result.j_trace = run.j_trace;
        result.designer_state_violations = run.state_violations;
        result.run = {{"designer", to_json(dc)},
                      {"state_violations", run.state_violations},
                      {"surrogate_snapshots", run.surrogate_snapshots}};
        break;
      }
      case Method::aprbs:
        result.inputs = aprbs(AprbsConfig{cfg.length, cfg.aprbs_min_hold, cfg.input_region, result.seed},
                              cfg.narx.sample_time);
        break;
      case Method::multisine:
        result.inputs = multisine(cfg.length, cfg.resolved_harmonics(), cfg.input_region, result.seed);
        break;
    }
    score_signal(context, result);
    result.ok = true;
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
  }
  return result;
}

Quantiles quantiles(std::vector<double> values) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (values.empty()) return {nan, nan, nan, nan, nan};
  std::sort(values.begin(), values.end());
  auto q = [&](double prob) {
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {values.front(), q(0.25), q(0.5), q(0.75), values.back()};
}

bool MetricsReport::all_ok() const {
  return std::all_of(replicates.begin(), replicates.end(), [](const ReplicateResult& r) { return r.ok; });
}

std::vector<const ReplicateResult*> MetricsReport::successes(Method method) const {
  std::vector<const ReplicateResult*> out;
  for (const auto& r : replicates)
    if (r.method == method && r.ok) out.push_back(&r);
  return out;
}

std::vector<MethodSummary> aggregate(const std::vector<Method>& methods, const std::vector<ReplicateResult>& replicates) {
  std::vector<MethodSummary> out;
  for (Method m : methods) {
    MethodSummary s;
    s.method = m;
    std::vector<double> r, j;
    for (const auto& rep : replicates) {
      if (rep.method != m) continue;
      if (!rep.ok) {
        ++s.failures;
        continue;
      }
      ++s.successes;
      r.push_back(rep.radius);
      j.push_back(rep.jsd);
    }
    s.radius = quantiles(r);
    s.jsd = quantiles(j);
    out.push_back(s);
  }
  return out;
}

MetricsReport run_experiment(const ExperimentConfig& config) {
  const ExperimentContext context = make_context(config);
  MetricsReport report;
  report.config = config;
  const std::size_t per_method = static_cast<std::size_t>(config.replicates);
  const std::size_t total = config.methods.size() * per_method;
  report.replicates.resize(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++)
      report.replicates[i] =
          run_replicate(context, config.methods[i / per_method], static_cast<int>(i % per_method) + 1);
  };
  const auto n_threads = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(config.jobs), total));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  report.summary = aggregate(config.methods, report.replicates);
  return report;
}

namespace {

nlohmann::json quantiles_json(const Quantiles& q) {
  auto v = [](double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); };
  return {{"min", v(q.min)}, {"q1", v(q.q1)}, {"median", v(q.median)}, {"q3", v(q.q3)}, {"max", v(q.max)}};
}

}  // namespace

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& r : replicates) {
    nlohmann::json j = {{"method", rhcsf::to_string(r.method)}, {"replicate", r.replicate}, {"seed", r.seed},
                        {"ok", r.ok}};
    if (r.ok) {
      j["R"] = r.radius;
      j["JSD"] = r.jsd;
      j["R_progress"] = r.radius_progress;
      j["JSD_progress"] = r.jsd_progress;
      j["state_violations"] = r.state_violations;
      j["designer_state_violations"] = r.designer_state_violations;
      j["inputs_in_region"] = r.inputs_in_region;
    } else {
      j["error"] = r.error;
    }
    reps.push_back(std::move(j));
  }
  nlohmann::json summ = nlohmann::json::array();
  for (const auto& s : summary)
    summ.push_back({{"method", rhcsf::to_string(s.method)},
                    {"successes", s.successes},
                    {"failures", s.failures},
                    {"R", quantiles_json(s.radius)},
                    {"JSD", quantiles_json(s.jsd)}});
  const UnitScaling scaling(config.state_region);
  return {{"config_hash", config.hash()},
          {"config", config.to_json()},
          {"normalization",
           {{"description", "unit = (x - offset) * scale, per regressor channel, from the state region"},
            {"offset", rhcsf::to_json(scaling.offset())},
            {"scale", rhcsf::to_json(scaling.scale())}}},
          {"replicates", reps},
          {"summary", summ}};
}

MetricsReport report_from_json(const nlohmann::json& value) {
  try {
    const auto& c = value.at("config");
    MetricsReport report;
    ExperimentConfig& cfg = report.config;
    cfg.plant = c.at("plant").get<std::string>();
    cfg.methods.clear();
    for (const auto& m : c.at("methods")) cfg.methods.push_back(parse_method(m.get<std::string>()));
    cfg.narx = {c.at("narx").at("n_u").get<int>(), c.at("narx").at("n_y").get<int>(), c.at("narx").at("order").get<int>(),
                c.at("narx").at("sample_time").get<double>()};
    auto region = [](const nlohmann::json& r) {
      const auto lo = r.at("lower").get<std::vector<double>>();
      const auto hi = r.at("upper").get<std::vector<double>>();
      return Region(Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                    Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size())));
    };
    cfg.input_region = region(c.at("input_region"));
    cfg.state_region = region(c.at("state_region"));
    cfg.interest_region = region(c.at("interest_region"));
    cfg.length = c.at("length").get<Eigen::Index>();
    cfg.horizon = c.at("horizon").get<Eigen::Index>();
    cfg.supporting_points = c.at("supporting_points").get<Eigen::Index>();
    cfg.evaluation_points = c.at("evaluation_points").get<Eigen::Index>();
    cfg.bins_per_axis = c.at("bins_per_axis").get<int>();
    cfg.replicates = c.at("replicates").get<int>();
    cfg.base_seed = c.at("base_seed").get<std::uint64_t>();
    cfg.initial_input = c.at("initial_input").get<double>();
    cfg.initial_output = c.at("initial_output").get<double>();
    cfg.time_constant = c.at("surrogate").at("time_constant").get<double>();
    cfg.gain = c.at("surrogate").at("gain").get<double>();
    const auto& d = c.at("designer");
    cfg.restarts = d.at("restarts").get<int>();
    cfg.max_grad_steps = d.at("max_grad_steps").get<int>();
    cfg.rel_tol = d.at("rel_tol").get<double>();
    cfg.state_penalty = d.at("state_penalty").get<double>();
    cfg.random_start = parse_random_start(d.at("random_start").get<std::string>());
    const auto& l = c.at("lolimot");
    cfg.lolimot = {l.at("max_models").get<int>(), l.at("sigma_factor").get<double>(), l.at("ridge").get<double>(),
                   l.at("exact_jacobian").get<bool>()};
    cfg.aprbs_min_hold = c.at("aprbs").at("min_hold_time").get<double>();
    cfg.multisine_harmonics = c.at("multisine").at("harmonics").get<int>();

    for (const auto& j : value.at("replicates")) {
      ReplicateResult r;
      r.method = parse_method(j.at("method").get<std::string>());
      r.replicate = j.at("replicate").get<int>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.ok = j.at("ok").get<bool>();
      if (r.ok) {
        r.radius = j.at("R").get<double>();
        r.jsd = j.at("JSD").get<double>();
        r.radius_progress = j.at("R_progress").get<std::vector<double>>();
        r.jsd_progress = j.at("JSD_progress").get<std::vector<double>>();
        r.state_violations = j.at("state_violations").get<Eigen::Index>();
        r.designer_state_violations = j.at("designer_state_violations").get<Eigen::Index>();
        r.inputs_in_region = j.at("inputs_in_region").get<bool>();
      } else {
        r.error = j.value("error", "");
      }
      report.replicates.push_back(std::move(r));
    }
    report.summary = aggregate(cfg.methods, report.replicates);
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

void write_replicate_signal(const fs::path& path, const ExperimentConfig& config, const ReplicateResult& result) {
  SignalTable table;
  table.inputs = result.inputs;
  table.predicted = result.predicted;
  table.measured = result.outputs;
  table.criterion = result.j_trace;
  table.comments = {"config_hash=" + config.hash() + " seed=" + std::to_string(result.seed) +
                    " method=" + to_string(result.method) + " replicate=" + std::to_string(result.replicate)};
  write_signal_csv(path, table, config.narx.n_y);
}

void persist(const MetricsReport& report, const ExperimentContext& context, const fs::path& out_dir) {
  const ExperimentConfig& cfg = report.config;
  const std::string hash = cfg.hash();
  fs::create_directories(out_dir);
  for (const auto& r : report.replicates) {
    if (!r.ok) continue;
    std::ostringstream stem;
    stem << to_string(r.method) << "_r" << std::setw(3) << std::setfill('0') << r.replicate;
    write_replicate_signal(out_dir / "signals" / (stem.str() + ".csv"), cfg, r);
    if (!r.run.is_null()) {
      nlohmann::json run = r.run;
      run["config_hash"] = hash;
      run["seed"] = r.seed;
      write_json(out_dir / "runs" / (stem.str() + ".json"), run);
    }
  }
  {
    std::ofstream out(out_dir / "metrics.csv");
    if (!out) throw FormatError("cannot write metrics.csv");
    out << "# config_hash=" << hash << " base_seed=" << cfg.base_seed << '\n';
    out << "method,replicate,seed,ok,R,JSD,state_violations,designer_state_violations,inputs_in_region,error\n";
    for (const auto& r : report.replicates) {
      out << to_string(r.method) << ',' << r.replicate << ',' << r.seed << ',' << (r.ok ? 1 : 0) << ',';
      if (r.ok)
        out << format(r.radius) << ',' << format(r.jsd) << ',' << r.state_violations << ','
            << r.designer_state_violations << ',' << (r.inputs_in_region ? 1 : 0) << ",\n";
      else {
        std::string msg = r.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        out << ",,,,," << msg << '\n';
      }
    }
  }
  const std::vector<std::string> provenance = {"config_hash=" + hash + " base_seed=" + std::to_string(cfg.base_seed)};
  write_points_csv(out_dir / "supporting_set.csv", context.psi.points, "psi_", provenance);
  write_points_csv(out_dir / "evaluation_set.csv", context.eval.points, "e_", provenance);
  write_json(out_dir / "report.json", report.to_json());
}

PlotKind parse_plot_kind(const std::string& text) {
  if (text == "boxplot") return PlotKind::boxplot;
  if (text == "progress") return PlotKind::progress;
  throw ConfigError("unknown plot kind '" + text + "'");
}

std::size_t median_replicate(const std::vector<const ReplicateResult*>& successes) {
  require(!successes.empty(), "median replicate of an empty set");
  std::vector<std::size_t> order(successes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (successes[a]->radius != successes[b]->radius) return successes[a]->radius < successes[b]->radius;
    return successes[a]->replicate < successes[b]->replicate;
  });
  return order[(order.size() - 1) / 2];
}

fs::path emit_plotdata(const MetricsReport& report, PlotKind kind, const fs::path& out_dir) {
  require(!report.replicates.empty(), "report has no replicates");
  fs::create_directories(out_dir);
  const ExperimentConfig& cfg = report.config;
  const fs::path path = out_dir / (kind == PlotKind::boxplot ? "boxplot.csv" : "progress.csv");
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "# config_hash=" << cfg.hash() << " base_seed=" << cfg.base_seed << '\n';

  std::vector<std::vector<const ReplicateResult*>> per_method;
  for (Method m : cfg.methods) per_method.push_back(report.successes(m));

  if (kind == PlotKind::boxplot) {
    std::size_t rows = 0;
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
      out << (i ? "," : "") << to_string(cfg.methods[i]) << "_R," << to_string(cfg.methods[i]) << "_JSD";
      rows = std::max(rows, per_method[i].size());
    }
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
        out << (i ? "," : "");
        if (r < per_method[i].size()) out << format(per_method[i][r]->radius) << ',' << format(per_method[i][r]->jsd);
        else out << ',';
      }
      out << '\n';
    }
    return path;
  }

  out << 'k';
  std::vector<const ReplicateResult*> chosen;
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    const std::string name = to_string(cfg.methods[i]);
    out << ',' << name << "_R_median_replicate," << name << "_R_pointwise_median," << name << "_JSD_pointwise_median";
    chosen.push_back(per_method[i].empty() ? nullptr : per_method[i][median_replicate(per_method[i])]);
  }
  out << '\n';
  for (Eigen::Index k = 0; k < cfg.length; ++k) {
    out << k + 1;
    const auto ku = static_cast<std::size_t>(k);
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
      if (!chosen[i]) {
        out << ",,,";
        continue;
      }
      std::vector<double> r, j;
      for (const auto* rep : per_method[i]) {
        r.push_back(rep->radius_progress[ku]);
        j.push_back(rep->jsd_progress[ku]);
      }
      out << ',' << format(chosen[i]->radius_progress[ku]) << ',' << format(quantiles(r).median) << ','
          << format(quantiles(j).median);
    }
    out << '\n';
  }
  return path;
}

}  // namespace rhcsf
