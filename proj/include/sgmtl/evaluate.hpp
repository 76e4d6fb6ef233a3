#pragma once

#include "sgmtl/baselines.hpp"
#include "sgmtl/datagen.hpp"
#include "sgmtl/solver.hpp"
#include "sgmtl/types.hpp"

#include <optional>
#include <string>
#include <vector>

// Method dispatch, cross-validation, and the sample-complexity sweep.
namespace sgmtl {

enum class MethodKind { stl, alltasks, single_group, clusmtl, sgmtl, fusion_sgmtl };

std::string to_string(MethodKind kind);
// Throws UnknownMethod for names outside
// {stl, alltasks, single-group, clusmtl, sgmtl, fusion-sgmtl}.
MethodKind method_from_string(const std::string& name);

struct MethodSpec {
  MethodKind kind = MethodKind::stl;
  ElasticNetConfig enet;       // stl / alltasks / clusmtl first stage
  double lambda_12 = 0.1;      // single_group / clusmtl second stage
  int n_clusters = 2;          // clusmtl
  SolverConfig solver;         // sgmtl / fusion_sgmtl (mu lives here)
  InitStrategy init;

  void validate() const;  // UnknownMethod / config errors
};

struct MethodResult {
  WeightMatrix weights;  // d x m
  std::optional<Membership> membership;
  std::optional<std::vector<int>> hard_groups;
  std::vector<double> objective_trace;
  bool converged = true;
  int iterations = 0;
};

// Fits `spec` on the full problem. fusion_sgmtl requires solver.mu > 0 and
// sgmtl forces mu = 0; both run the same alternating solver.
MethodResult run_method(const Problem& problem, const MethodSpec& spec);

struct MetricsReport {
  std::vector<double> mse_per_task;
  double mse_avg = 0.0;
  std::optional<double> r2_avg;      // absent if every fold was degenerate
  std::optional<double> aucpr_avg;   // logistic problems only
  std::optional<double> ari;         // filled by callers that know the truth
  std::optional<double> best_perm_accuracy;
};

// Per-task k-fold cross-validation (folds shuffled from `seed`): fits the
// method on each training split and scores held-out examples. Throws
// TooFewExamples if any task has fewer than k_folds examples.
MetricsReport cross_validate(const Problem& problem, const MethodSpec& spec, int k_folds,
                             std::uint64_t seed);

struct SweepRow {
  int n_per_task = 0;
  std::string method;
  double mse = 0.0;                // held-out MSE, averaged over seeds
  std::optional<double> ari;       // methods that produce groups
  double support_f1 = 0.0;         // recovered-support F1, averaged
};

// For each n in n_grid and each method: generate training data of that size
// from `spec` (per seed), fit, and score on a fresh held-out sample from the
// same ground truth. Rows are ordered by (n, method).
std::vector<SweepRow> sample_complexity_sweep(const SyntheticSpec& spec,
                                              const std::vector<int>& n_grid,
                                              const std::vector<MethodSpec>& methods,
                                              const std::vector<std::uint64_t>& seeds,
                                              int n_test = 200);

}  // namespace sgmtl
