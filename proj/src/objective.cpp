#include "sgmtl/objective.hpp"

#include <cmath>
#include <string>

namespace sgmtl {

namespace {

// log(1 + exp(x)) without overflow for large |x|.
inline double log1p_exp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

void check_pair_shapes(const WeightMatrix& weights, const Membership& membership) {
  if (weights.cols() != membership.cols())
    throw DimensionMismatch("weights have " + std::to_string(weights.cols()) +
                            " columns but membership has " + std::to_string(membership.cols()));
  if (membership.rows() == 0) throw DimensionMismatch("membership has no groups");
}

}  // namespace

Eigen::VectorXd resolve_lambda(const std::vector<double>& lambda, Eigen::Index n_groups) {
  Eigen::VectorXd out(n_groups);
  if (lambda.size() == 1) {
    out.setConstant(lambda.front());
  } else if (lambda.size() == static_cast<std::size_t>(n_groups)) {
    for (Eigen::Index g = 0; g < n_groups; ++g) out[g] = lambda[static_cast<std::size_t>(g)];
  } else {
    throw DimensionMismatch("lambda must have 1 or " + std::to_string(n_groups) +
                            " entries, got " + std::to_string(lambda.size()));
  }
  return out;
}

double task_loss(const TaskDataset& data, const Eigen::VectorXd& w) {
  if (w.size() != data.d())
    throw DimensionMismatch("weight vector has " + std::to_string(w.size()) +
                            " entries for task with " + std::to_string(data.d()) + " features");
  const double n = static_cast<double>(data.n());
  double value = 0.0;
  if (data.loss == LossKind::squared) {
    value = (data.targets - data.features * w).squaredNorm() / (2.0 * n);
  } else {
    const Eigen::VectorXd margins =
        data.targets.cwiseProduct(data.features * w);  // y_i * x_i.w
    double sum = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) sum += log1p_exp(-margins[i]);
    value = sum / n;
  }
  if (!std::isfinite(value)) throw NonFinite("task loss is not finite");
  return value;
}

Eigen::VectorXd task_loss_gradient(const TaskDataset& data, const Eigen::VectorXd& w) {
  if (w.size() != data.d())
    throw DimensionMismatch("weight vector size mismatch in task_loss_gradient");
  const double n = static_cast<double>(data.n());
  if (data.loss == LossKind::squared) {
    return data.features.transpose() * (data.features * w - data.targets) / n;
  }
  const Eigen::VectorXd margins = data.targets.cwiseProduct(data.features * w);
  Eigen::VectorXd coeff(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    // -y_i * sigma(-margin_i); sigma in a form stable for both signs.
    const double m = margins[i];
    const double sig = m >= 0.0 ? std::exp(-m) / (1.0 + std::exp(-m)) : 1.0 / (1.0 + std::exp(m));
    coeff[i] = -data.targets[i] * sig;
  }
  return data.features.transpose() * coeff / n;
}

double group_norm(const WeightMatrix& weights, const Membership& membership, int group) {
  check_pair_shapes(weights, membership);
  if (group < 0 || group >= membership.rows())
    throw DimensionMismatch("group index " + std::to_string(group) + " out of range");
  // Per row j: sqrt(sum_t u_{g,t} w_{j,t}^2); then sum over rows.
  const Eigen::VectorXd row_sq =
      weights.array().square().matrix() * membership.row(group).transpose();
  return row_sq.array().max(0.0).sqrt().sum();
}

double regularizer(const WeightMatrix& weights, const Membership& membership,
                   const std::vector<double>& lambda) {
  check_pair_shapes(weights, membership);
  const Eigen::VectorXd lam = resolve_lambda(lambda, membership.rows());
  double value = 0.0;
  for (Eigen::Index g = 0; g < membership.rows(); ++g) {
    if (lam[g] == 0.0) continue;
    const double norm = group_norm(weights, membership, static_cast<int>(g));
    value += lam[g] * norm * norm;
  }
  if (!std::isfinite(value)) throw NonFinite("regularizer is not finite");
  return value;
}

double fusion_penalty(const Membership& membership, double mu) {
  if (mu == 0.0) return 0.0;
  // sum_{t<t'} (u_t - u_t')^2 per row = m * sum u^2 - (sum u)^2.
  const double m = static_cast<double>(membership.cols());
  double value = 0.0;
  for (Eigen::Index g = 0; g < membership.rows(); ++g) {
    const double sq = membership.row(g).squaredNorm();
    const double sum = membership.row(g).sum();
    value += m * sq - sum * sum;
  }
  value *= mu;
  if (!std::isfinite(value)) throw NonFinite("fusion penalty is not finite");
  // Guard tiny negative round-off from the rearranged pair sum.
  return value < 0.0 ? 0.0 : value;
}

ObjectiveBreakdown total_objective(const Problem& problem, const WeightMatrix& weights,
                                   const Membership& membership, const SolverConfig& config) {
  if (weights.rows() != problem.d() || weights.cols() != problem.m())
    throw DimensionMismatch("weights shape does not match problem");
  if (membership.cols() != problem.m())
    throw DimensionMismatch("membership shape does not match problem");
  if (membership.rows() != config.n_groups)
    throw DimensionMismatch("membership has " + std::to_string(membership.rows()) +
                            " rows for a config with " + std::to_string(config.n_groups) +
                            " groups");

  const Eigen::Index m = problem.m();
  Eigen::VectorXd losses(m);
#pragma omp parallel for schedule(static)
  for (Eigen::Index t = 0; t < m; ++t)
    losses[t] = task_loss(problem.tasks[static_cast<std::size_t>(t)], weights.col(t));

  ObjectiveBreakdown breakdown;
  breakdown.loss = losses.sum();
  breakdown.regularizer = regularizer(weights, membership, config.lambda);
  breakdown.fusion = fusion_penalty(membership, config.mu);
  breakdown.total = breakdown.loss + breakdown.regularizer + breakdown.fusion;
  if (!std::isfinite(breakdown.total)) throw NonFinite("objective is not finite");
  return breakdown;
}

}  // namespace sgmtl
