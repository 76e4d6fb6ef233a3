#include "sgmtl/evaluate.hpp"

#include "sgmtl/metrics.hpp"
#include "sgmtl/objective.hpp"
#include "sgmtl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace sgmtl {

std::string to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::stl: return "stl";
    case MethodKind::alltasks: return "alltasks";
    case MethodKind::single_group: return "single-group";
    case MethodKind::clusmtl: return "clusmtl";
    case MethodKind::sgmtl: return "sgmtl";
    case MethodKind::fusion_sgmtl: return "fusion-sgmtl";
  }
  throw UnknownMethod("invalid method kind");
}

MethodKind method_from_string(const std::string& name) {
  if (name == "stl") return MethodKind::stl;
  if (name == "alltasks") return MethodKind::alltasks;
  if (name == "single-group") return MethodKind::single_group;
  if (name == "clusmtl") return MethodKind::clusmtl;
  if (name == "sgmtl") return MethodKind::sgmtl;
  if (name == "fusion-sgmtl") return MethodKind::fusion_sgmtl;
  throw UnknownMethod("unknown method: " + name);
}

void MethodSpec::validate() const {
  if (kind == MethodKind::fusion_sgmtl && !(solver.mu > 0.0))
    throw BadLabels("fusion-sgmtl requires mu > 0");
  if (kind == MethodKind::sgmtl || kind == MethodKind::fusion_sgmtl) solver.validate();
  if (kind == MethodKind::clusmtl && n_clusters < 1)
    throw DegenerateClustering("clusmtl needs n_clusters >= 1");
  if (lambda_12 < 0.0) throw BadLabels("lambda_12 must be >= 0");
}

MethodResult run_method(const Problem& problem, const MethodSpec& spec) {
  spec.validate();
  MethodResult result;
  switch (spec.kind) {
    case MethodKind::stl: {
      result.weights = fit_stl(problem, spec.enet);
      break;
    }
    case MethodKind::alltasks: {
      const Eigen::VectorXd w = fit_all_tasks(problem, spec.enet);
      result.weights = w.replicate(1, problem.m());
      break;
    }
    case MethodKind::single_group: {
      result.weights = fit_multitask_lasso(problem, spec.lambda_12);
      break;
    }
    case MethodKind::clusmtl: {
      const FitResult fit_out =
          fit_clus_mtl(problem, spec.n_clusters, spec.enet, spec.lambda_12, spec.solver.seed);
      result.weights = fit_out.weights;
      result.membership = fit_out.membership;
      result.hard_groups = fit_out.hard_groups;
      break;
    }
    case MethodKind::sgmtl:
    case MethodKind::fusion_sgmtl: {
      SolverConfig config = spec.solver;
      if (spec.kind == MethodKind::sgmtl) config.mu = 0.0;
      const FitResult fit_out = fit(problem, config, spec.init);
      result.weights = fit_out.weights;
      result.membership = fit_out.membership;
      result.hard_groups = fit_out.hard_groups;
      result.objective_trace = fit_out.objective_trace;
      result.converged = fit_out.converged;
      result.iterations = fit_out.iterations;
      break;
    }
  }
  return result;
}

namespace {

struct FoldSplit {
  Problem train;
  std::vector<TaskDataset> test;  // one held-out slice per task
};

FoldSplit make_fold(const Problem& problem, const std::vector<std::vector<int>>& fold_of_row,
                    int fold) {
  FoldSplit split;
  split.train.tasks.resize(problem.tasks.size());
  split.test.resize(problem.tasks.size());
  for (std::size_t t = 0; t < problem.tasks.size(); ++t) {
    const TaskDataset& task = problem.tasks[t];
    std::vector<int> train_rows, test_rows;
    for (int i = 0; i < static_cast<int>(task.n()); ++i) {
      if (fold_of_row[t][static_cast<std::size_t>(i)] == fold)
        test_rows.push_back(i);
      else
        train_rows.push_back(i);
    }
    auto take = [&](const std::vector<int>& rows) {
      TaskDataset out;
      out.loss = task.loss;
      out.task_id = task.task_id;
      out.features.resize(static_cast<Eigen::Index>(rows.size()), task.d());
      out.targets.resize(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        out.features.row(static_cast<Eigen::Index>(r)) = task.features.row(rows[r]);
        out.targets[static_cast<Eigen::Index>(r)] = task.targets[rows[r]];
      }
      return out;
    };
    split.train.tasks[t] = take(train_rows);
    split.test[t] = take(test_rows);
  }
  return split;
}

}  // namespace

MetricsReport cross_validate(const Problem& problem, const MethodSpec& spec, int k_folds,
                             std::uint64_t seed) {
  validate_problem(problem);
  if (k_folds < 2) throw BadLabels("cross_validate needs k_folds >= 2");
  for (const auto& task : problem.tasks)
    if (task.n() < k_folds)
      throw TooFewExamples("task '" + task.task_id + "' has fewer examples than folds");

  // Shuffled fold labels per task, balanced to within one example.
  std::vector<std::vector<int>> fold_of_row(problem.tasks.size());
  for (std::size_t t = 0; t < problem.tasks.size(); ++t) {
    const Eigen::Index n = problem.tasks[t].n();
    Rng rng(mix_seed(seed, 0x666f6c64ull /* "fold" */, fnv1a(problem.tasks[t].task_id)));
    const std::vector<int> perm = rng.permutation(static_cast<int>(n));
    fold_of_row[t].resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      fold_of_row[t][static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
          static_cast<int>(i % k_folds);
  }

  const std::size_t m = problem.tasks.size();
  // predictions[fold][task], targets likewise; filled in parallel, reduced
  // in fixed order afterwards.
  std::vector<std::vector<Eigen::VectorXd>> fold_preds(static_cast<std::size_t>(k_folds)),
      fold_targets(static_cast<std::size_t>(k_folds));

#pragma omp parallel for schedule(dynamic)
  for (int fold = 0; fold < k_folds; ++fold) {
    const FoldSplit split = make_fold(problem, fold_of_row, fold);
    const MethodResult fit_out = run_method(split.train, spec);
    auto& preds = fold_preds[static_cast<std::size_t>(fold)];
    auto& targs = fold_targets[static_cast<std::size_t>(fold)];
    preds.resize(m);
    targs.resize(m);
    for (std::size_t t = 0; t < m; ++t) {
      preds[t] = split.test[t].features * fit_out.weights.col(static_cast<Eigen::Index>(t));
      targs[t] = split.test[t].targets;
    }
  }

  MetricsReport report;
  report.mse_per_task.resize(m, 0.0);
  double r2_sum = 0.0;
  int r2_count = 0;
  double aucpr_sum = 0.0;
  int aucpr_count = 0;
  const bool logistic = problem.tasks.front().loss == LossKind::logistic;

  for (std::size_t t = 0; t < m; ++t) {
    // Pool every held-out prediction of the task across folds.
    Eigen::Index total = 0;
    for (int fold = 0; fold < k_folds; ++fold)
      total += fold_preds[static_cast<std::size_t>(fold)][t].size();
    Eigen::VectorXd preds(total), targs(total);
    Eigen::Index at = 0;
    for (int fold = 0; fold < k_folds; ++fold) {
      const auto& p = fold_preds[static_cast<std::size_t>(fold)][t];
      preds.segment(at, p.size()) = p;
      targs.segment(at, p.size()) = fold_targets[static_cast<std::size_t>(fold)][t];
      at += p.size();
    }
    try {
      const auto [mse, r2] = mse_r2(preds, targs);
      report.mse_per_task[t] = mse;
      r2_sum += r2;
      ++r2_count;
    } catch (const DegenerateTargets&) {
      report.mse_per_task[t] = (preds - targs).squaredNorm() / static_cast<double>(total);
    }
    if (logistic) {
      try {
        aucpr_sum += auc_pr(preds, targs);
        ++aucpr_count;
      } catch (const NoPositives&) {
      }
    }
  }

  report.mse_avg =
      std::accumulate(report.mse_per_task.begin(), report.mse_per_task.end(), 0.0) /
      static_cast<double>(m);
  if (r2_count > 0) report.r2_avg = r2_sum / r2_count;
  if (aucpr_count > 0) report.aucpr_avg = aucpr_sum / aucpr_count;
  return report;
}

namespace {

double support_f1(const Eigen::VectorXd& column, const std::vector<int>& true_support) {
  std::set<int> truth(true_support.begin(), true_support.end());
  int predicted = 0, hits = 0;
  for (Eigen::Index j = 0; j < column.size(); ++j) {
    if (std::abs(column[j]) > 1e-6) {
      ++predicted;
      if (truth.count(static_cast<int>(j))) ++hits;
    }
  }
  if (predicted == 0 && truth.empty()) return 1.0;
  if (predicted == 0 || truth.empty()) return 0.0;
  const double precision = static_cast<double>(hits) / predicted;
  const double recall = static_cast<double>(hits) / static_cast<double>(truth.size());
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

std::vector<SweepRow> sample_complexity_sweep(const SyntheticSpec& spec,
                                              const std::vector<int>& n_grid,
                                              const std::vector<MethodSpec>& methods,
                                              const std::vector<std::uint64_t>& seeds,
                                              int n_test) {
  if (n_grid.empty() || methods.empty() || seeds.empty())
    throw BadLabels("sample_complexity_sweep needs non-empty grids");

  struct Cell {
    double mse = 0.0;
    double ari = 0.0;
    bool has_ari = false;
    double f1 = 0.0;
  };
  const int cells = static_cast<int>(n_grid.size() * methods.size() * seeds.size());
  std::vector<Cell> results(static_cast<std::size_t>(cells));

#pragma omp parallel for schedule(dynamic)
  for (int cell = 0; cell < cells; ++cell) {
    const std::size_t si = static_cast<std::size_t>(cell) % seeds.size();
    const std::size_t mi = (static_cast<std::size_t>(cell) / seeds.size()) % methods.size();
    const std::size_t ni = static_cast<std::size_t>(cell) / (seeds.size() * methods.size());

    SyntheticSpec cell_spec = spec;
    cell_spec.n_per_task = n_grid[ni];
    cell_spec.seed = seeds[si];
    auto [train, truth] = make_custom(cell_spec);
    const Problem test =
        sample_problem(truth, n_test, spec.noise_sigma, mix_seed(seeds[si], 0x74657374ull));

    const MethodResult fit_out = run_method(train, methods[mi]);

    Cell& out = results[static_cast<std::size_t>(cell)];
    double mse_sum = 0.0, f1_sum = 0.0;
    for (Eigen::Index t = 0; t < test.m(); ++t) {
      const Eigen::VectorXd preds =
          test.tasks[static_cast<std::size_t>(t)].features * fit_out.weights.col(t);
      mse_sum += (preds - test.tasks[static_cast<std::size_t>(t)].targets).squaredNorm() /
                 static_cast<double>(preds.size());
      f1_sum += support_f1(
          fit_out.weights.col(t),
          truth.supports[static_cast<std::size_t>(
              truth.group_of_task[static_cast<std::size_t>(t)])]);
    }
    out.mse = mse_sum / static_cast<double>(test.m());
    out.f1 = f1_sum / static_cast<double>(test.m());
    if (fit_out.hard_groups) {
      out.ari = group_recovery(*fit_out.hard_groups, truth.group_of_task).ari;
      out.has_ari = true;
    }
  }

  std::vector<SweepRow> rows;
  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      SweepRow row;
      row.n_per_task = n_grid[ni];
      row.method = to_string(methods[mi].kind);
      double ari_sum = 0.0;
      bool has_ari = true;
      for (std::size_t si = 0; si < seeds.size(); ++si) {
        const auto& cell =
            results[(ni * methods.size() + mi) * seeds.size() + si];
        row.mse += cell.mse;
        row.support_f1 += cell.f1;
        ari_sum += cell.ari;
        has_ari = has_ari && cell.has_ari;
      }
      row.mse /= static_cast<double>(seeds.size());
      row.support_f1 /= static_cast<double>(seeds.size());
      if (has_ari) row.ari = ari_sum / static_cast<double>(seeds.size());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace sgmtl
