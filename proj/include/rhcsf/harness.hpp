#pragma once

#include "rhcsf/core.hpp"
#include "rhcsf/designer.hpp"
#include "rhcsf/io.hpp"
#include "rhcsf/metrics.hpp"
#include "rhcsf/process.hpp"
#include "rhcsf/sampling.hpp"
#include "rhcsf/surrogate.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rhcsf {

enum class Method { proposed_fixed, proposed_adaptive, aprbs, multisine };

[[nodiscard]] const char* to_string(Method method) noexcept;
[[nodiscard]] Method parse_method(const std::string& text);

/// Everything that defines one batch experiment. See README for the config-file schema.
struct ExperimentConfig {
  std::string plant = "hammerstein";
  std::vector<Method> methods{Method::proposed_fixed, Method::proposed_adaptive, Method::aprbs};
  NarxConfig narx{1, 1, 1, 1.0};
  Region input_region = Region::unit(1);     // U
  Region state_region = Region::unit(2);     // X
  Region interest_region = Region::unit(2);  // C
  Eigen::Index length = 300;                 // N
  Eigen::Index horizon = 0;                  // L; 0 means round(4 T / T_s)
  Eigen::Index supporting_points = 0;        // N_psi; 0 means 5 N
  Eigen::Index evaluation_points = kDefaultEvaluationPoints;
  int bins_per_axis = kDefaultBinsPerAxis;
  int replicates = 10;
  std::uint64_t base_seed = 0;
  double initial_input = 0.5;   // every lagged input before k = 1
  double initial_output = 0.5;  // every lagged output before k = 1

  // fixed LTI surrogate, also the cold start of the adaptive mode
  double time_constant = 5.0;
  double gain = 1.0;

  // designer
  int restarts = 5;
  int max_grad_steps = 50;
  double rel_tol = 1e-6;
  double state_penalty = 1e3;
  RandomStart random_start = RandomStart::piecewise_constant;
  LolimotOptions lolimot;

  double aprbs_min_hold = 1.0;   // seconds
  int multisine_harmonics = 0;   // 0 means N / 4

  int jobs = 1;  // worker threads; does not affect results

  [[nodiscard]] Eigen::Index resolved_horizon() const;
  [[nodiscard]] Eigen::Index resolved_supporting_points() const;
  [[nodiscard]] int resolved_harmonics() const;
  [[nodiscard]] InitialState initial_state() const;
  [[nodiscard]] DesignerConfig designer(Method method, std::uint64_t seed) const;
  void validate() const;

  /// Result-relevant fields only (jobs is left out).
  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] std::string hash() const;
};

[[nodiscard]] ExperimentConfig experiment_config_from(const ConfigDocument& doc);
[[nodiscard]] ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Per-configuration objects shared by every replicate and method.
struct ExperimentContext {
  ExperimentConfig config;
  Plant plant;
  UnitScaling scaling;  // X -> [0,1]^p
  SupportingSet psi;    // unit coordinates
  EvaluationSet eval;   // unit coordinates
  Region unit_interest;
  SurrogatePtr prior;
  DesignProblem problem;
};

[[nodiscard]] ExperimentContext make_context(const ExperimentConfig& config);

struct ReplicateResult {
  Method method = Method::proposed_fixed;
  int replicate = 0;  // 1-based
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;

  Matrix inputs;     // committed inputs
  Matrix outputs;    // plant outputs
  Matrix predicted;  // designer's surrogate outputs (designer methods only)
  std::vector<double> j_trace;
  nlohmann::json run;  // designer provenance (config, snapshots), null for baselines

  double radius = 0.0;
  double jsd = 0.0;
  std::vector<double> radius_progress;
  std::vector<double> jsd_progress;
  Eigen::Index state_violations = 0;  // true regressor rows outside X
  Eigen::Index designer_state_violations = 0;  // rows the designer committed outside X (its own view)
  bool inputs_in_region = true;
};

/// Generate, simulate and score one signal.
[[nodiscard]] ReplicateResult run_replicate(const ExperimentContext& context, Method method, int replicate);

/// Score inputs produced elsewhere (plant simulated from the configured initial state).
void score_signal(const ExperimentContext& context, ReplicateResult& result);

struct Quantiles {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Linear-interpolation sample quantiles (R type 7). Empty input gives NaNs.
[[nodiscard]] Quantiles quantiles(std::vector<double> values);

struct MethodSummary {
  Method method = Method::proposed_fixed;
  int successes = 0;
  int failures = 0;
  Quantiles radius;
  Quantiles jsd;
};

struct MetricsReport {
  ExperimentConfig config;
  std::vector<ReplicateResult> replicates;  // method-major, then replicate
  std::vector<MethodSummary> summary;

  [[nodiscard]] bool all_ok() const;
  [[nodiscard]] std::vector<const ReplicateResult*> successes(Method method) const;
  [[nodiscard]] nlohmann::json to_json() const;
};

[[nodiscard]] std::vector<MethodSummary> aggregate(const std::vector<Method>& methods,
                                                  const std::vector<ReplicateResult>& replicates);

/// Run every method for replicates r = 1..R with seed base_seed + r, using `config.jobs` threads.
[[nodiscard]] MetricsReport run_experiment(const ExperimentConfig& config);

/// Rebuild a report (without signals) from report.json.
[[nodiscard]] MetricsReport report_from_json(const nlohmann::json& value);

/// Write signals/, runs/, metrics.csv, report.json and the supporting/evaluation sets.
void persist(const MetricsReport& report, const ExperimentContext& context, const std::filesystem::path& out_dir);

/// Signal CSV for one replicate, with provenance comment lines.
void write_replicate_signal(const std::filesystem::path& path, const ExperimentConfig& config,
                            const ReplicateResult& result);

enum class PlotKind { boxplot, progress };

[[nodiscard]] PlotKind parse_plot_kind(const std::string& text);

/// Index into `successes` of the replicate whose final R is the lower order-statistic
/// median (sorted position floor((n-1)/2), ties broken by replicate number).
[[nodiscard]] std::size_t median_replicate(const std::vector<const ReplicateResult*>& successes);

/// boxplot.csv: columns <method>_R,<method>_JSD, one row per successful replicate.
/// progress.csv: one row per k with, per method, R(k) of the median replicate and
/// the pointwise medians of R(k) and JSD(k) across replicates.
[[nodiscard]] std::filesystem::path emit_plotdata(const MetricsReport& report, PlotKind kind,
                                                  const std::filesystem::path& out_dir);

}  // namespace rhcsf
