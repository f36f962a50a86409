// rhcsf command-line tool: design, experiment, metrics, plotdata.

#include "rhcsf/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace rhcsf;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "rhcsf-out";
};

ExperimentConfig load(const Common& common) {
  ExperimentConfig cfg = common.config_path.empty() ? ExperimentConfig{} : load_experiment_config(common.config_path);
  if (common.seed) cfg.base_seed = *common.seed;
  return cfg;
}

void print_summary(const MetricsReport& report) {
  std::printf("%-18s %4s %4s %10s %10s %10s %10s\n", "method", "ok", "fail", "R_med", "R_iqr", "JSD_med", "JSD_iqr");
  for (const auto& s : report.summary)
    std::printf("%-18s %4d %4d %10.6f %10.6f %10.6f %10.6f\n", to_string(s.method), s.successes, s.failures,
                s.radius.median, s.radius.q3 - s.radius.q1, s.jsd.median, s.jsd.q3 - s.jsd.q1);
}

int cmd_design(const Common& common, const std::string& method_name) {
  ExperimentConfig cfg = load(common);
  const Method method = parse_method(method_name);
  cfg.methods = {method};
  cfg.replicates = 1;
  const ExperimentContext ctx = make_context(cfg);
  // replicate 0: the seed is used as given
  const ReplicateResult r = run_replicate(ctx, method, 0);
  if (!r.ok) {
    std::cerr << "design failed: " << r.error << '\n';
    return 1;
  }
  const fs::path out(common.out_dir);
  write_replicate_signal(out / "signal.csv", cfg, r);
  nlohmann::json record = {{"config_hash", cfg.hash()}, {"config", cfg.to_json()}, {"seed", r.seed},
                           {"method", to_string(method)}, {"R", r.radius}, {"JSD", r.jsd},
                           {"state_violations", r.state_violations}, {"inputs_in_region", r.inputs_in_region}};
  if (!r.run.is_null()) record["run"] = r.run;
  write_json(out / "run.json", record);
  std::printf("method=%s seed=%llu R=%.6f JSD=%.6f -> %s\n", to_string(method),
              static_cast<unsigned long long>(r.seed), r.radius, r.jsd, (out / "signal.csv").c_str());
  return 0;
}

int cmd_experiment(const Common& common, const std::vector<std::string>& methods, int replicates, int jobs) {
  ExperimentConfig cfg = load(common);
  if (!methods.empty()) {
    cfg.methods.clear();
    for (const auto& m : methods) cfg.methods.push_back(parse_method(m));
  }
  if (replicates > 0) cfg.replicates = replicates;
  if (jobs > 0) cfg.jobs = jobs;
  const ExperimentContext ctx = make_context(cfg);
  const MetricsReport report = run_experiment(cfg);
  const fs::path out(common.out_dir);
  persist(report, ctx, out);
  (void)emit_plotdata(report, PlotKind::boxplot, out);
  (void)emit_plotdata(report, PlotKind::progress, out);
  print_summary(report);
  for (const auto& r : report.replicates)
    if (!r.ok) std::cerr << to_string(r.method) << " replicate " << r.replicate << " failed: " << r.error << '\n';
  return report.all_ok() ? 0 : 1;
}

int cmd_metrics(const Common& common, const std::string& signal_path) {
  const ExperimentConfig cfg = load(common);
  const ExperimentContext ctx = make_context(cfg);
  ReplicateResult r;
  r.inputs = read_signal_csv(signal_path).inputs;
  score_signal(ctx, r);
  std::printf("R=%.9f JSD=%.9f state_violations=%lld inputs_in_region=%d\n", r.radius, r.jsd,
              static_cast<long long>(r.state_violations), r.inputs_in_region ? 1 : 0);
  if (!common.out_dir.empty()) {
    write_json(fs::path(common.out_dir) / "metrics.json",
               {{"signal", signal_path}, {"config_hash", cfg.hash()}, {"R", r.radius}, {"JSD", r.jsd},
                {"R_progress", r.radius_progress}, {"JSD_progress", r.jsd_progress},
                {"state_violations", r.state_violations}, {"inputs_in_region", r.inputs_in_region}});
  }
  return 0;
}

int cmd_plotdata(const Common& common, const std::string& report_path, const std::string& kind) {
  const MetricsReport report = report_from_json(read_json(report_path));
  std::vector<PlotKind> kinds;
  if (kind == "all") kinds = {PlotKind::boxplot, PlotKind::progress};
  else kinds = {parse_plot_kind(kind)};
  for (PlotKind k : kinds) std::cout << emit_plotdata(report, k, common.out_dir).string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Receding-horizon space-filling excitation signal design"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Experiment config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Base seed (design: the run seed)");
    sub->add_option("--out-dir", common.out_dir, "Output directory");
  };

  std::string method = "proposed-fixed";
  auto* design = app.add_subcommand("design", "Generate one signal and score it");
  add_common(design);
  design->add_option("--method", method, "proposed-fixed | proposed-adaptive | aprbs | multisine");

  std::vector<std::string> methods;
  int replicates = 0;
  int jobs = 0;
  auto* experiment = app.add_subcommand("experiment", "Run the replicate batch and write the report");
  add_common(experiment);
  experiment->add_option("--method", methods, "Restrict to these methods (repeatable)");
  experiment->add_option("--replicates", replicates, "Replicates per method")->check(CLI::PositiveNumber);
  experiment->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string signal;
  auto* metrics = app.add_subcommand("metrics", "Score an existing signal CSV");
  add_common(metrics);
  metrics->add_option("signal", signal, "Signal CSV (u_1.. columns)")->required()->check(CLI::ExistingFile);

  std::string report;
  std::string kind = "all";
  auto* plotdata = app.add_subcommand("plotdata", "Emit boxplot/progress CSVs from report.json");
  add_common(plotdata);
  plotdata->add_option("report", report, "report.json")->required()->check(CLI::ExistingFile);
  plotdata->add_option("--kind", kind, "boxplot | progress | all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*design) return cmd_design(common, method);
    if (*experiment) return cmd_experiment(common, methods, replicates, jobs);
    if (*metrics) return cmd_metrics(common, signal);
    if (*plotdata) return cmd_plotdata(common, report, kind);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
