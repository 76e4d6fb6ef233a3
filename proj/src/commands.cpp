#include "sgmtl/commands.hpp"

#include "sgmtl/datagen.hpp"
#include "sgmtl/evaluate.hpp"
#include "sgmtl/io.hpp"
#include "sgmtl/metrics.hpp"
#include "sgmtl/objective.hpp"
#include "sgmtl/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace sgmtl {

namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_text(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("short write to " + path);
}

std::string join_args(const std::vector<std::string>& args) {
  std::string joined = "sgmtl";
  for (const auto& a : args) {
    joined += ' ';
    joined += a;
  }
  return joined;
}

void apply_jobs(int jobs) {
#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
}

// Hyperparameters shared by fit/cv/sweep-n; one point in the grid.
struct MethodOptions {
  std::string method = "sgmtl";
  double l1 = 0.01;
  double l2 = 0.01;
  double lambda_12 = 0.1;
  int clusters = 2;
  double lambda = 0.001;
  double mu = 0.001;
  int n_groups = 5;
  double tol = 1e-5;
  int max_outer = 100;
  int u_restarts = 5;
  std::string init = "stl";
  std::uint64_t seed = 0;

  MethodSpec to_spec() const {
    MethodSpec spec;
    spec.kind = method_from_string(method);
    spec.enet.l1 = l1;
    spec.enet.l2 = l2;
    spec.lambda_12 = lambda_12;
    spec.n_clusters = clusters;
    spec.solver.n_groups = n_groups;
    spec.solver.lambda = {lambda};
    spec.solver.mu = spec.kind == MethodKind::fusion_sgmtl ? mu : 0.0;
    spec.solver.tol = tol;
    spec.solver.max_outer = max_outer;
    spec.solver.u_restarts = u_restarts;
    spec.solver.seed = seed;
    if (init == "stl")
      spec.init.kind = InitKind::stl_warm_start;
    else if (init == "zeros")
      spec.init.kind = InitKind::zeros;
    else
      throw UnknownMethod("unknown init strategy: " + init);
    return spec;
  }

  ordered_json config_json() const {
    ordered_json j;
    j["method"] = method;
    j["l1"] = l1;
    j["l2"] = l2;
    j["lambda_12"] = lambda_12;
    j["clusters"] = clusters;
    j["lambda"] = lambda;
    j["mu"] = mu;
    j["n_groups"] = n_groups;
    j["tol"] = tol;
    j["max_outer"] = max_outer;
    j["u_restarts"] = u_restarts;
    j["init"] = init;
    return j;
  }
};

void add_method_options(CLI::App* cmd, MethodOptions& opts) {
  cmd->add_option("--method", opts.method,
                  "one of stl, alltasks, single-group, clusmtl, sgmtl, fusion-sgmtl");
  cmd->add_option("--l1", opts.l1, "elastic net L1 weight (stl/alltasks/clusmtl warm start)");
  cmd->add_option("--l2", opts.l2, "elastic net L2 weight");
  cmd->add_option("--lambda12", opts.lambda_12, "row-norm weight (single-group/clusmtl)");
  cmd->add_option("--clusters", opts.clusters, "cluster count for clusmtl");
  cmd->add_option("--lambda", opts.lambda, "group penalty weight (sgmtl)");
  cmd->add_option("--mu", opts.mu, "membership fusion weight (fusion-sgmtl)");
  cmd->add_option("--n-groups", opts.n_groups, "group count N (sgmtl)");
  cmd->add_option("--tol", opts.tol, "solver tolerance");
  cmd->add_option("--max-outer", opts.max_outer, "outer iteration cap");
  cmd->add_option("--restarts", opts.u_restarts, "U-step restarts");
  cmd->add_option("--init", opts.init, "weight init: stl or zeros");
  cmd->add_option("--seed", opts.seed, "random seed")->envname("SGMTL_SEED");
}

ordered_json make_manifest(const std::vector<std::string>& args, const ordered_json& config,
                           std::uint64_t seed, const std::string& fingerprint, double duration) {
  ordered_json manifest;
  manifest["command"] = join_args(args);
  manifest["config"] = config;
  manifest["seed"] = seed;
  manifest["dataset_fingerprint"] = fingerprint;
  manifest["tool_version"] = kToolVersion;
  manifest["duration_seconds"] = duration;
  return manifest;
}

ordered_json metrics_json(const Problem& problem, const WeightMatrix& weights,
                          const std::optional<std::vector<int>>& hard_groups,
                          const std::optional<GroundTruth>& truth) {
  ordered_json metrics;
  std::vector<double> mse_per_task;
  double mse_sum = 0.0, r2_sum = 0.0;
  int r2_count = 0;
  for (Eigen::Index t = 0; t < problem.m(); ++t) {
    const auto& task = problem.tasks[static_cast<std::size_t>(t)];
    const Eigen::VectorXd preds = task.features * weights.col(t);
    double mse = (preds - task.targets).squaredNorm() / static_cast<double>(task.n());
    try {
      const auto [m, r2] = mse_r2(preds, task.targets);
      mse = m;
      r2_sum += r2;
      ++r2_count;
    } catch (const Error&) {
    }
    mse_per_task.push_back(mse);
    mse_sum += mse;
  }
  metrics["mse_per_task"] = mse_per_task;
  metrics["mse_avg"] = mse_sum / static_cast<double>(problem.m());
  if (r2_count > 0) metrics["r2_avg"] = r2_sum / r2_count;
  if (hard_groups && truth) {
    const GroupRecovery rec = group_recovery(*hard_groups, truth->group_of_task);
    metrics["ari"] = rec.ari;
    metrics["best_perm_accuracy"] = rec.best_perm_accuracy;
  }
  return metrics;
}

// ---- generate ---------------------------------------------------------------

struct GenerateOptions {
  std::string preset;
  SyntheticSpec spec;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int cmd_generate(const std::vector<std::string>& args, const GenerateOptions& opts) {
  Problem problem;
  GroundTruth truth;
  if (opts.preset == "set1") {
    std::tie(problem, truth) = make_set1(opts.seed);
  } else if (opts.preset == "set2") {
    std::tie(problem, truth) = make_set2(opts.seed);
  } else if (opts.preset.empty()) {
    SyntheticSpec spec = opts.spec;
    spec.seed = opts.seed;
    std::tie(problem, truth) = make_custom(spec);
  } else {
    throw UnknownMethod("unknown preset: " + opts.preset);
  }
  save_dataset(opts.out_dir, problem, &truth);
  std::cout << "wrote " << problem.m() << " tasks to " << opts.out_dir << "\n";
  (void)args;
  return kExitOk;
}

// ---- fit --------------------------------------------------------------------

struct FitOptions {
  std::string data_dir;
  MethodOptions method;
  int jobs = 0;
  std::string out_file;
};

int cmd_fit(const std::vector<std::string>& args, const FitOptions& opts) {
  const auto start = Clock::now();
  apply_jobs(opts.jobs);
  const LoadedDataset loaded = load_dataset(opts.data_dir);
  const std::string fingerprint = dataset_fingerprint(opts.data_dir);

  const MethodSpec spec = opts.method.to_spec();
  const MethodResult fit_out = run_method(loaded.problem, spec);

  ordered_json result;
  result["manifest"] = ordered_json();  // placeholder to pin key order
  result["converged"] = fit_out.converged;
  result["iterations"] = fit_out.iterations;
  result["objective_trace"] = fit_out.objective_trace;
  result["weights"] = matrix_to_json(fit_out.weights);
  if (fit_out.membership) result["membership"] = matrix_to_json(*fit_out.membership);
  if (fit_out.hard_groups) result["hard_groups"] = *fit_out.hard_groups;
  result["metrics"] =
      metrics_json(loaded.problem, fit_out.weights, fit_out.hard_groups, loaded.truth);
  result["manifest"] = make_manifest(args, opts.method.config_json(), opts.method.seed,
                                     fingerprint, seconds_since(start));
  write_text(opts.out_file, result.dump(2) + "\n");
  std::cout << "fit " << opts.method.method << ": training mse_avg = "
            << result["metrics"]["mse_avg"].dump() << "\n";
  return kExitOk;
}

// ---- cv ---------------------------------------------------------------------

struct CvOptions {
  std::string data_dir;
  MethodOptions method;
  int folds = 5;
  int jobs = 0;
  std::vector<double> lambda_grid;
  std::vector<double> mu_grid;
  std::vector<double> l1_grid;
  std::vector<double> lambda12_grid;
  std::vector<int> clusters_grid;
  std::string out_file;
};

int cmd_cv(const std::vector<std::string>& args, const CvOptions& opts) {
  const auto start = Clock::now();
  apply_jobs(opts.jobs);
  const LoadedDataset loaded = load_dataset(opts.data_dir);
  const std::string fingerprint = dataset_fingerprint(opts.data_dir);

  // Cartesian grid over whichever axes were given; a missing axis pins the
  // point value from the flags.
  auto axis = [](std::vector<double> grid, double point) {
    return grid.empty() ? std::vector<double>{point} : grid;
  };
  const std::vector<double> lambdas = axis(opts.lambda_grid, opts.method.lambda);
  const std::vector<double> mus = axis(opts.mu_grid, opts.method.mu);
  const std::vector<double> l1s = axis(opts.l1_grid, opts.method.l1);
  const std::vector<double> lambda12s = axis(opts.lambda12_grid, opts.method.lambda_12);
  const std::vector<int> clusters =
      opts.clusters_grid.empty() ? std::vector<int>{opts.method.clusters} : opts.clusters_grid;

  ordered_json table = ordered_json::array();
  double best_mse = 0.0;
  ordered_json best;
  for (double l1 : l1s)
    for (double lambda12 : lambda12s)
      for (int k : clusters)
        for (double lambda : lambdas)
          for (double mu : mus) {
            MethodOptions point = opts.method;
            point.l1 = l1;
            point.lambda_12 = lambda12;
            point.clusters = k;
            point.lambda = lambda;
            point.mu = mu;
            const MetricsReport report =
                cross_validate(loaded.problem, point.to_spec(), opts.folds, opts.method.seed);
            ordered_json row;
            row["l1"] = l1;
            row["lambda_12"] = lambda12;
            row["clusters"] = k;
            row["lambda"] = lambda;
            row["mu"] = mu;
            row["mse_avg"] = report.mse_avg;
            if (report.r2_avg) row["r2_avg"] = *report.r2_avg;
            if (report.aucpr_avg) row["aucpr_avg"] = *report.aucpr_avg;
            row["mse_per_task"] = report.mse_per_task;
            if (best.is_null() || report.mse_avg < best_mse) {
              best_mse = report.mse_avg;
              best = row;
            }
            table.push_back(std::move(row));
          }

  ordered_json result;
  result["manifest"] = ordered_json();
  result["folds"] = opts.folds;
  result["grid"] = std::move(table);
  result["best"] = std::move(best);
  ordered_json config = opts.method.config_json();
  config["folds"] = opts.folds;
  result["manifest"] = make_manifest(args, config, opts.method.seed, fingerprint,
                                     seconds_since(start));
  write_text(opts.out_file, result.dump(2) + "\n");
  std::cout << "cv " << opts.method.method << ": best mse_avg = " << best_mse << "\n";
  return kExitOk;
}

// ---- sweep-n ----------------------------------------------------------------

struct SweepNOptions {
  std::string data_dir;
  MethodOptions method;
  std::vector<int> n_list;
  int folds = 5;
  int jobs = 0;
  std::string out_file;
  std::string csv_file;
};

int cmd_sweep_n(const std::vector<std::string>& args, const SweepNOptions& opts) {
  const auto start = Clock::now();
  apply_jobs(opts.jobs);
  if (opts.n_list.empty()) throw BadLabels("sweep-n needs a non-empty --n-list");
  const LoadedDataset loaded = load_dataset(opts.data_dir);
  const std::string fingerprint = dataset_fingerprint(opts.data_dir);

  ordered_json rows = ordered_json::array();
  std::string csv = "n_groups,mse_avg\n";
  for (int n_groups : opts.n_list) {
    MethodOptions point = opts.method;
    point.n_groups = n_groups;
    const MetricsReport report =
        cross_validate(loaded.problem, point.to_spec(), opts.folds, opts.method.seed);
    ordered_json row;
    row["n_groups"] = n_groups;
    row["mse_avg"] = report.mse_avg;
    if (report.r2_avg) row["r2_avg"] = *report.r2_avg;
    rows.push_back(std::move(row));
    csv += std::to_string(n_groups) + "," + format_double(report.mse_avg) + "\n";
  }

  ordered_json result;
  result["manifest"] = ordered_json();
  result["folds"] = opts.folds;
  result["rows"] = std::move(rows);
  ordered_json config = opts.method.config_json();
  config["folds"] = opts.folds;
  config["n_list"] = opts.n_list;
  result["manifest"] = make_manifest(args, config, opts.method.seed, fingerprint,
                                     seconds_since(start));
  write_text(opts.out_file, result.dump(2) + "\n");
  if (!opts.csv_file.empty()) write_text(opts.csv_file, csv);
  std::cout << "sweep-n over " << opts.n_list.size() << " group counts done\n";
  return kExitOk;
}

// ---- samplesweep ------------------------------------------------------------

struct SampleSweepOptions {
  SyntheticSpec spec;
  std::vector<int> n_grid;
  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds;
  MethodOptions method;  // shared hyperparameters for each method
  int n_test = 200;
  int jobs = 0;
  std::string out_file;
};

int cmd_samplesweep(const std::vector<std::string>& args, const SampleSweepOptions& opts) {
  const auto start = Clock::now();
  apply_jobs(opts.jobs);
  if (opts.n_grid.empty() || opts.methods.empty() || opts.seeds.empty())
    throw BadLabels("samplesweep needs --n-grid, --methods and --seeds");

  std::vector<MethodSpec> specs;
  for (const auto& name : opts.methods) {
    MethodOptions point = opts.method;
    point.method = name;
    specs.push_back(point.to_spec());
  }

  const std::vector<SweepRow> rows =
      sample_complexity_sweep(opts.spec, opts.n_grid, specs, opts.seeds, opts.n_test);

  ordered_json config = opts.method.config_json();
  config["n_grid"] = opts.n_grid;
  config["methods"] = opts.methods;
  config["seeds"] = opts.seeds;
  config["n_test"] = opts.n_test;
  const ordered_json manifest = make_manifest(
      args, config, opts.seeds.front(), "", seconds_since(start));

  std::string csv = "# manifest " + manifest.dump() + "\n";
  csv += "n,method,mse,ari,support_f1\n";
  for (const auto& row : rows) {
    csv += std::to_string(row.n_per_task) + "," + row.method + "," + format_double(row.mse) + ",";
    if (row.ari) csv += format_double(*row.ari);
    csv += "," + format_double(row.support_f1) + "\n";
  }
  write_text(opts.out_file, csv);
  std::cout << "samplesweep wrote " << rows.size() << " rows\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"sparsity-grouped multitask learning toolkit"};
  app.name("sgmtl");
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "write a synthetic dataset directory");
  generate->add_option("--preset", gen.preset, "set1 or set2 (overrides size flags)")
      ->check(CLI::IsMember({"set1", "set2"}));
  generate->add_option("--tasks", gen.spec.m, "number of tasks");
  generate->add_option("--examples", gen.spec.n_per_task, "examples per task");
  generate->add_option("--features", gen.spec.d, "feature count");
  generate->add_option("--groups", gen.spec.n_groups_true, "true group count");
  generate->add_option("--support", gen.spec.support_size, "support size per group");
  generate->add_option("--overlap", gen.spec.overlap_fraction, "support overlap fraction");
  generate->add_option("--sigma", gen.spec.noise_sigma, "noise standard deviation");
  generate->add_option("--seed", gen.seed, "random seed")->envname("SGMTL_SEED");
  generate->add_option("--out", gen.out_dir, "output directory")->required();

  FitOptions fit_opts;
  auto* fit_cmd = app.add_subcommand("fit", "fit one method on a dataset");
  fit_cmd->add_option("--data", fit_opts.data_dir, "dataset directory")->required();
  add_method_options(fit_cmd, fit_opts.method);
  fit_cmd->add_option("--jobs", fit_opts.jobs, "worker thread cap");
  fit_cmd->add_option("--out", fit_opts.out_file, "result JSON path")->required();

  CvOptions cv_opts;
  auto* cv_cmd = app.add_subcommand("cv", "k-fold cross-validation over a grid");
  cv_cmd->add_option("--data", cv_opts.data_dir, "dataset directory")->required();
  add_method_options(cv_cmd, cv_opts.method);
  cv_cmd->add_option("--folds", cv_opts.folds, "fold count");
  cv_cmd->add_option("--jobs", cv_opts.jobs, "worker thread cap");
  cv_cmd->add_option("--lambda-grid", cv_opts.lambda_grid, "lambda values")->delimiter(',');
  cv_cmd->add_option("--mu-grid", cv_opts.mu_grid, "mu values")->delimiter(',');
  cv_cmd->add_option("--l1-grid", cv_opts.l1_grid, "elastic net l1 values")->delimiter(',');
  cv_cmd->add_option("--lambda12-grid", cv_opts.lambda12_grid, "lambda_12 values")
      ->delimiter(',');
  cv_cmd->add_option("--clusters-grid", cv_opts.clusters_grid, "cluster counts")->delimiter(',');
  cv_cmd->add_option("--out", cv_opts.out_file, "result JSON path")->required();

  SweepNOptions sweep_opts;
  auto* sweep_cmd = app.add_subcommand("sweep-n", "CV error as a function of group count");
  sweep_cmd->add_option("--data", sweep_opts.data_dir, "dataset directory")->required();
  add_method_options(sweep_cmd, sweep_opts.method);
  sweep_cmd->add_option("--n-list", sweep_opts.n_list, "group counts to try")
      ->delimiter(',')
      ->required();
  sweep_cmd->add_option("--folds", sweep_opts.folds, "fold count");
  sweep_cmd->add_option("--jobs", sweep_opts.jobs, "worker thread cap");
  sweep_cmd->add_option("--out", sweep_opts.out_file, "result JSON path")->required();
  sweep_cmd->add_option("--csv", sweep_opts.csv_file, "optional CSV curve path");

  SampleSweepOptions sample_opts;
  auto* sample_cmd = app.add_subcommand("samplesweep", "held-out error vs training size");
  sample_cmd->add_option("--tasks", sample_opts.spec.m, "number of tasks");
  sample_cmd->add_option("--features", sample_opts.spec.d, "feature count");
  sample_cmd->add_option("--groups", sample_opts.spec.n_groups_true, "true group count");
  sample_cmd->add_option("--support", sample_opts.spec.support_size, "support size");
  sample_cmd->add_option("--overlap", sample_opts.spec.overlap_fraction, "overlap fraction");
  sample_cmd->add_option("--sigma", sample_opts.spec.noise_sigma, "noise sigma");
  sample_cmd->add_option("--n-grid", sample_opts.n_grid, "training sizes")
      ->delimiter(',')
      ->required();
  sample_cmd->add_option("--methods", sample_opts.methods, "methods to compare")
      ->delimiter(',')
      ->required();
  sample_cmd->add_option("--seeds", sample_opts.seeds, "seeds to average over")->delimiter(',');
  add_method_options(sample_cmd, sample_opts.method);
  sample_cmd->add_option("--n-test", sample_opts.n_test, "held-out examples per task");
  sample_cmd->add_option("--jobs", sample_opts.jobs, "worker thread cap");
  sample_cmd->add_option("--out", sample_opts.out_file, "output CSV path")->required();

  std::vector<std::string> cli_args(args.rbegin(), args.rend());  // CLI11 wants reversed
  try {
    app.parse(cli_args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;  // --help exits cleanly
  }

  try {
    if (generate->parsed()) return cmd_generate(args, gen);
    if (fit_cmd->parsed()) return cmd_fit(args, fit_opts);
    if (cv_cmd->parsed()) return cmd_cv(args, cv_opts);
    if (sweep_cmd->parsed()) return cmd_sweep_n(args, sweep_opts);
    if (sample_cmd->parsed()) {
      if (sample_opts.seeds.empty()) sample_opts.seeds = {sample_opts.method.seed};
      return cmd_samplesweep(args, sample_opts);
    }
    throw UnknownMethod("no subcommand selected");
  } catch (const NoConvergence& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const NonFinite& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitSolver;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace sgmtl
