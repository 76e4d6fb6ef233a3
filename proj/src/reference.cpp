#include "sgmtl/reference.hpp"

#include "sgmtl/objective.hpp"

#include <cmath>

// Naive loop twins of the optimized kernels. Kept dumb on purpose: explicit
// per-element loops, direct formula transcription, no shared subexpressions
// beyond what the math itself states.
namespace sgmtl::reference {

double task_loss(const TaskDataset& data, const Eigen::VectorXd& w) {
  const Eigen::Index n = data.n();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double dot = 0.0;
    for (Eigen::Index j = 0; j < data.d(); ++j) dot += data.features(i, j) * w[j];
    if (data.loss == LossKind::squared) {
      const double r = data.targets[i] - dot;
      total += 0.5 * r * r;
    } else {
      const double z = -data.targets[i] * dot;
      total += z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
  }
  return total / static_cast<double>(n);
}

double group_norm(const WeightMatrix& weights, const Membership& membership, int group) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < weights.rows(); ++j) {
    double row = 0.0;
    for (Eigen::Index t = 0; t < weights.cols(); ++t)
      row += membership(group, t) * weights(j, t) * weights(j, t);
    total += std::sqrt(row);
  }
  return total;
}

double regularizer(const WeightMatrix& weights, const Membership& membership,
                   const std::vector<double>& lambda) {
  double total = 0.0;
  for (Eigen::Index g = 0; g < membership.rows(); ++g) {
    const double lam = lambda.size() == 1 ? lambda[0] : lambda[static_cast<std::size_t>(g)];
    const double norm = group_norm(weights, membership, static_cast<int>(g));
    total += lam * norm * norm;
  }
  return total;
}

double fusion_penalty(const Membership& membership, double mu) {
  double total = 0.0;
  for (Eigen::Index t = 0; t < membership.cols(); ++t)
    for (Eigen::Index t2 = t + 1; t2 < membership.cols(); ++t2)
      total += (membership.col(t) - membership.col(t2)).squaredNorm();
  return mu * total;
}

double total_objective(const Problem& problem, const WeightMatrix& weights,
                       const Membership& membership, const SolverConfig& config) {
  double total = 0.0;
  for (Eigen::Index t = 0; t < problem.m(); ++t)
    total += reference::task_loss(problem.tasks[static_cast<std::size_t>(t)], weights.col(t));
  total += reference::regularizer(weights, membership, config.lambda);
  total += reference::fusion_penalty(membership, config.mu);
  return total;
}

Eigen::MatrixXd grad_regularizer_u(const WeightMatrix& weights, const Membership& membership,
                                   const std::vector<double>& lambda, double epsilon_denom) {
  const Eigen::Index n_groups = membership.rows();
  const Eigen::Index m = membership.cols();
  Eigen::MatrixXd grad(n_groups, m);
  for (Eigen::Index g = 0; g < n_groups; ++g) {
    const double lam = lambda.size() == 1 ? lambda[0] : lambda[static_cast<std::size_t>(g)];
    double norm_sum = 0.0;
    for (Eigen::Index j = 0; j < weights.rows(); ++j) {
      double row = 0.0;
      for (Eigen::Index t = 0; t < m; ++t)
        row += membership(g, t) * weights(j, t) * weights(j, t);
      norm_sum += std::sqrt(row);
    }
    for (Eigen::Index t = 0; t < m; ++t) {
      double inner = 0.0;
      for (Eigen::Index j = 0; j < weights.rows(); ++j) {
        double row = 0.0;
        for (Eigen::Index t2 = 0; t2 < m; ++t2)
          row += membership(g, t2) * weights(j, t2) * weights(j, t2);
        inner += weights(j, t) * weights(j, t) / std::max(std::sqrt(row), epsilon_denom);
      }
      grad(g, t) = lam * norm_sum * inner;
    }
  }
  return grad;
}

Eigen::MatrixXd grad_fusion_u(const Membership& membership, double mu) {
  const Eigen::Index n_groups = membership.rows();
  const Eigen::Index m = membership.cols();
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n_groups, m);
  for (Eigen::Index g = 0; g < n_groups; ++g)
    for (Eigen::Index t = 0; t < m; ++t)
      for (Eigen::Index t2 = 0; t2 < m; ++t2)
        if (t2 != t) grad(g, t) += 2.0 * mu * (membership(g, t) - membership(g, t2));
  return grad;
}

}  // namespace sgmtl::reference
