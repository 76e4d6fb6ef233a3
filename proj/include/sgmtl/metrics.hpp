#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

// Pointwise evaluation metrics: regression error, precision-recall area,
// and clustering agreement.
namespace sgmtl {

// (MSE, R^2) with R^2 = 1 - SSE/SST against the mean predictor. Requires at
// least two points; throws DegenerateTargets when the targets have zero
// variance, DimensionMismatch / TooFewExamples otherwise.
std::pair<double, double> mse_r2(const Eigen::VectorXd& predictions,
                                 const Eigen::VectorXd& targets);

// Area under the precision-recall curve for labels in {-1,+1}: thresholds
// sweep the distinct score values (ties grouped), area is the stepwise sum
// sum_k (R_k - R_{k-1}) * P_k. Throws NoPositives when no label is positive,
// BadLabels on anything outside {-1,+1}.
double auc_pr(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

struct GroupRecovery {
  double ari = 0.0;            // adjusted Rand index
  double best_perm_accuracy = 0.0;  // accuracy under the best label permutation
};

// Agreement between a predicted and a true hard grouping (label values are
// arbitrary ids). ARI by pair counting; accuracy maximized over label
// matchings via the Hungarian algorithm. Throws DimensionMismatch on length
// mismatch or empty input.
GroupRecovery group_recovery(const std::vector<int>& predicted, const std::vector<int>& truth);

// Minimum-cost assignment on a square cost matrix (Hungarian algorithm,
// O(n^3)); returns the column assigned to each row. Exposed for reuse and
// testing.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

}  // namespace sgmtl
