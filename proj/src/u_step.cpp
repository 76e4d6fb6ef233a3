#include "sgmtl/u_step.hpp"

#include "sgmtl/objective.hpp"
#include "sgmtl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace sgmtl {

namespace {

constexpr double kDecreaseSlack = 1e-12;
constexpr int kMaxHalvings = 40;

// Regularizer + fusion part of the objective; the loss does not depend on U.
double membership_objective(const WeightMatrix& weights, const Membership& membership,
                            const SolverConfig& config) {
  return regularizer(weights, membership, config.lambda) +
         fusion_penalty(membership, config.mu);
}

struct RestartOutcome {
  Membership membership;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

RestartOutcome run_descent(const WeightMatrix& weights, Membership membership,
                           const SolverConfig& config) {
  double current = membership_objective(weights, membership, config);
  int iterations = 0;
  for (int it = 0; it < config.max_u_iters; ++it) {
    ++iterations;
    const Eigen::MatrixXd grad =
        grad_regularizer_u(weights, membership, config.lambda, config.epsilon_denom) +
        grad_fusion_u(membership, config.mu);

    double step = config.u_step_size;
    bool accepted = false;
    Membership candidate;
    double candidate_value = current;
    for (int halving = 0; halving < kMaxHalvings; ++halving) {
      candidate = project_columns_simplex(membership - step * grad);
      candidate_value = membership_objective(weights, candidate, config);
      if (candidate_value <= current + kDecreaseSlack) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent direction left at this scale

    const double improvement = current - candidate_value;
    membership = std::move(candidate);
    current = candidate_value;
    if (improvement < config.tol * std::max(1.0, std::abs(current))) break;
  }
  return {std::move(membership), current, iterations};
}

}  // namespace

Eigen::MatrixXd grad_regularizer_u(const WeightMatrix& weights, const Membership& membership,
                                   const std::vector<double>& lambda, double epsilon_denom) {
  if (weights.cols() != membership.cols())
    throw DimensionMismatch("weights/membership column mismatch in grad_regularizer_u");
  const Eigen::Index n_groups = membership.rows();
  const Eigen::VectorXd lam = resolve_lambda(lambda, n_groups);

  const Eigen::MatrixXd weights_sq = weights.array().square();        // d x m
  const Eigen::MatrixXd row_sq = membership * weights_sq.transpose(); // N x d
  const Eigen::MatrixXd row_norms = row_sq.array().max(0.0).sqrt();   // r_{g,j}
  const Eigen::VectorXd norm_sums = row_norms.rowwise().sum();        // sum_j r_{g,j}
  const Eigen::MatrixXd inv_norms = row_norms.array().max(epsilon_denom).inverse();
  const Eigen::MatrixXd inner = inv_norms * weights_sq;               // N x m

  return (lam.cwiseProduct(norm_sums)).asDiagonal() * inner;
}

Eigen::MatrixXd grad_fusion_u(const Membership& membership, double mu) {
  if (mu == 0.0) return Eigen::MatrixXd::Zero(membership.rows(), membership.cols());
  const double m = static_cast<double>(membership.cols());
  const Eigen::VectorXd row_sums = membership.rowwise().sum();
  return 2.0 * mu * (m * membership - row_sums.replicate(1, membership.cols()));
}

Eigen::VectorXd project_column_simplex(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw DimensionMismatch("projecting empty vector onto simplex");
  if (!v.allFinite()) throw NonFinite("non-finite input to simplex projection");

  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    running += sorted[k];
    const double candidate = (running - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0);
}

Membership project_columns_simplex(const Membership& matrix) {
  Membership out(matrix.rows(), matrix.cols());
  for (Eigen::Index t = 0; t < matrix.cols(); ++t)
    out.col(t) = project_column_simplex(matrix.col(t));
  return out;
}

UStepReport u_step(const Problem& problem, const WeightMatrix& weights,
                   const Membership& membership, const SolverConfig& config,
                   std::uint64_t round_salt) {
  if (membership.rows() != config.n_groups)
    throw DimensionMismatch("membership group count does not match config");
  if (membership.cols() != problem.m())
    throw DimensionMismatch("membership task count does not match problem");

  const double loss_part =
      total_objective(problem, weights, membership, config).loss;

  UStepReport report;
  report.objective_before = loss_part + membership_objective(weights, membership, config);

  if (config.n_groups == 1) {
    // One-dimensional simplex is the single point {1}; nothing can move.
    report.final_membership = Membership::Ones(1, problem.m());
    report.objective_after =
        loss_part + membership_objective(weights, report.final_membership, config);
    return report;
  }

  const int restarts = config.u_restarts;
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < restarts; ++r) {
    Membership start;
    if (r == 0) {
      start = membership;
    } else {
      // Per-task streams so a task permutation permutes the restart draws.
      start.resize(config.n_groups, problem.m());
      for (Eigen::Index t = 0; t < problem.m(); ++t) {
        const std::uint64_t task_salt =
            fnv1a(problem.tasks[static_cast<std::size_t>(t)].task_id);
        Rng rng(mix_seed(config.seed, mix_seed(round_salt, static_cast<std::uint64_t>(r)),
                         task_salt));
        start.col(t) = rng.simplex_uniform(config.n_groups);
      }
    }
    outcomes[static_cast<std::size_t>(r)] = run_descent(weights, std::move(start), config);
  }

  int best = 0;
  for (int r = 1; r < restarts; ++r)
    if (outcomes[static_cast<std::size_t>(r)].value < outcomes[static_cast<std::size_t>(best)].value)
      best = r;

  report.final_membership = std::move(outcomes[static_cast<std::size_t>(best)].membership);
  report.iterations = outcomes[static_cast<std::size_t>(best)].iterations;
  report.restart_index = best;
  report.objective_after = loss_part + outcomes[static_cast<std::size_t>(best)].value;
  return report;
}

}  // namespace sgmtl
