#include "sgmtl/metrics.hpp"

#include "sgmtl/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace sgmtl {

std::pair<double, double> mse_r2(const Eigen::VectorXd& predictions,
                                 const Eigen::VectorXd& targets) {
  if (predictions.size() != targets.size())
    throw DimensionMismatch("prediction/target length mismatch");
  if (targets.size() < 2) throw TooFewExamples("mse_r2 needs at least two points");

  const double n = static_cast<double>(targets.size());
  const double sse = (predictions - targets).squaredNorm();
  const double mean = targets.mean();
  const double sst = (targets.array() - mean).matrix().squaredNorm();
  if (sst == 0.0) throw DegenerateTargets("targets have zero variance, R^2 undefined");
  return {sse / n, 1.0 - sse / sst};
}

double auc_pr(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  if (scores.size() != labels.size())
    throw DimensionMismatch("score/label length mismatch");
  const Eigen::Index n = labels.size();
  if (n == 0) throw TooFewExamples("auc_pr on empty input");

  double positives = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[i] != 1.0 && labels[i] != -1.0)
      throw BadLabels("auc_pr labels must be -1 or +1");
    if (labels[i] == 1.0) positives += 1.0;
  }
  if (positives == 0.0) throw NoPositives("auc_pr needs at least one positive label");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return scores[a] > scores[b]; });

  // Walk thresholds at distinct score values (tied scores enter together).
  double area = 0.0;
  double tp = 0.0, fp = 0.0, prev_recall = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t block_end = i;
    while (block_end < order.size() &&
           scores[order[block_end]] == scores[order[i]])
      ++block_end;
    for (std::size_t idx = i; idx < block_end; ++idx) {
      if (labels[order[idx]] == 1.0)
        tp += 1.0;
      else
        fp += 1.0;
    }
    const double recall = tp / positives;
    const double precision = tp / (tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = block_end;
  }
  return area;
}

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols() || cost.rows() == 0)
    throw DimensionMismatch("min_cost_assignment needs a non-empty square matrix");
  const int n = static_cast<int>(cost.rows());

  // Hungarian algorithm with potentials; 1-indexed internals.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> match(static_cast<std::size_t>(n) + 1, 0);  // column -> row
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (match[static_cast<std::size_t>(j)] > 0)
      row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

GroupRecovery group_recovery(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size() || predicted.empty())
    throw DimensionMismatch("group_recovery needs two equal non-empty labelings");
  const double n = static_cast<double>(predicted.size());

  // Compact labels, then contingency counts.
  std::map<int, int> pred_ids, true_ids;
  for (int p : predicted) pred_ids.emplace(p, static_cast<int>(pred_ids.size()));
  for (int t : truth) true_ids.emplace(t, static_cast<int>(true_ids.size()));
  const int kp = static_cast<int>(pred_ids.size());
  const int kt = static_cast<int>(true_ids.size());

  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(kp, kt);
  for (std::size_t i = 0; i < predicted.size(); ++i)
    counts(pred_ids[predicted[i]], true_ids[truth[i]]) += 1.0;

  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_cells = 0.0;
  for (int a = 0; a < kp; ++a)
    for (int b = 0; b < kt; ++b) sum_cells += choose2(counts(a, b));
  double sum_rows = 0.0;
  for (int a = 0; a < kp; ++a) sum_rows += choose2(counts.row(a).sum());
  double sum_cols = 0.0;
  for (int b = 0; b < kt; ++b) sum_cols += choose2(counts.col(b).sum());
  const double total_pairs = choose2(n);

  GroupRecovery out;
  if (total_pairs == 0.0) {
    out.ari = 1.0;  // single point: trivially identical clusterings
  } else {
    const double expected = sum_rows * sum_cols / total_pairs;
    const double maximum = 0.5 * (sum_rows + sum_cols);
    out.ari = maximum == expected ? 1.0 : (sum_cells - expected) / (maximum - expected);
  }

  // Best-permutation accuracy via min-cost assignment on -counts (padded to
  // square so extra labels just match nothing).
  const int k = std::max(kp, kt);
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(k, k);
  padded.topLeftCorner(kp, kt) = counts;
  const std::vector<int> assignment = min_cost_assignment(-padded);
  double matched = 0.0;
  for (int a = 0; a < k; ++a) matched += padded(a, assignment[static_cast<std::size_t>(a)]);
  out.best_perm_accuracy = matched / n;
  return out;
}

}  // namespace sgmtl
