#pragma once

#include "sgmtl/types.hpp"

#include <cstdint>
#include <vector>

// Reference methods the main solver is compared against: per-task elastic
// net (STL), one pooled model (AllTasks), a single jointly-regularized group
// (multitask lasso), and cluster-then-share (ClusMTL).
namespace sgmtl {

struct ElasticNetConfig {
  double l1 = 0.01;
  double l2 = 0.01;
  int max_iters = 1000;
  double tol = 1e-6;  // KKT residual target
};

// Coordinate descent for (1/(2n)) ||y - Xw||^2 (or the logistic analogue,
// via its curvature bound) + l1 ||w||_1 + (l2/2) ||w||^2. Stops when the KKT
// residual is <= tol; throws NoConvergence if it is still > 10*tol after
// max_iters passes.
Eigen::VectorXd fit_elastic_net(const TaskDataset& data, const ElasticNetConfig& config);

// KKT residual of the elastic-net objective at w (max over coordinates).
double elastic_net_kkt_residual(const TaskDataset& data, const Eigen::VectorXd& w,
                                const ElasticNetConfig& config);

// Per-task elastic net fits stacked into a d x m weight matrix.
WeightMatrix fit_stl(const Problem& problem, const ElasticNetConfig& config);

// Pools every task's rows into one dataset and fits a single model.
// Throws MixedLossKinds if tasks disagree on the loss.
Eigen::VectorXd fit_all_tasks(const Problem& problem, const ElasticNetConfig& config);

// Multitask lasso over a subset of tasks: proximal gradient descent on
//   sum_{t in subset} task_loss(w_t) + lambda_12 * sum_j ||W_j||_2
// with backtracking (objective non-increasing per iteration). Returns the
// d x |subset| weight block in subset order; rows are exactly zero or fully
// finite after final thresholding. An empty subset means all tasks.
Eigen::MatrixXd fit_multitask_lasso(const Problem& problem, double lambda_12,
                                    const std::vector<int>& task_subset = {},
                                    int max_iters = 5000, double tol = 1e-10);

// Lloyd k-means over the columns of `points` with k-means++ style seeding.
// On an empty cluster the seeding is retried (up to 10 reseeds) before an
// empty cluster is accepted. Returns per-column cluster labels.
std::vector<int> kmeans_columns(const Eigen::MatrixXd& points, int k, std::uint64_t seed);

// ClusMTL: STL fits -> k-means on the weight columns -> one multitask lasso
// per non-empty cluster. Membership in the result is the one-hot encoding of
// the clustering; the trace is left empty. Throws DegenerateClustering if
// n_clusters is out of range.
FitResult fit_clus_mtl(const Problem& problem, int n_clusters, const ElasticNetConfig& stl_config,
                       double lambda_12, std::uint64_t seed = 0);

}  // namespace sgmtl
