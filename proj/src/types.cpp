#include "sgmtl/types.hpp"

#include <cmath>

namespace sgmtl {

std::string to_string(LossKind kind) {
  return kind == LossKind::squared ? "squared" : "logistic";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "squared") return LossKind::squared;
  if (name == "logistic") return LossKind::logistic;
  throw BadLabels("unknown loss kind: " + name);
}

void validate_problem(const Problem& problem) {
  if (problem.tasks.empty()) throw EmptyProblem("problem has no tasks");
  const Eigen::Index d = problem.tasks.front().d();
  for (const auto& task : problem.tasks) {
    if (task.n() == 0) throw EmptyProblem("task '" + task.task_id + "' has no examples");
    if (task.d() != d)
      throw DimensionMismatch("task '" + task.task_id + "' has " + std::to_string(task.d()) +
                              " features, expected " + std::to_string(d));
    if (task.targets.size() != task.n())
      throw DimensionMismatch("task '" + task.task_id + "' has " +
                              std::to_string(task.targets.size()) + " targets for " +
                              std::to_string(task.n()) + " rows");
    if (!task.features.allFinite() || !task.targets.allFinite())
      throw NonFinite("task '" + task.task_id + "' contains non-finite values");
    if (task.loss == LossKind::logistic) {
      for (Eigen::Index i = 0; i < task.n(); ++i) {
        const double y = task.targets[i];
        if (y != 1.0 && y != -1.0)
          throw BadLabels("task '" + task.task_id + "' has logistic target " + std::to_string(y) +
                          ", expected -1 or +1");
      }
    }
  }
}

double SolverConfig::lambda_for(int g) const {
  if (lambda.size() == 1) return lambda.front();
  return lambda.at(static_cast<std::size_t>(g));
}

void SolverConfig::validate() const {
  if (n_groups < 1) throw BadLabels("n_groups must be >= 1");
  if (lambda.size() != 1 && lambda.size() != static_cast<std::size_t>(n_groups))
    throw DimensionMismatch("lambda must have 1 or n_groups entries, got " +
                            std::to_string(lambda.size()));
  for (double l : lambda)
    if (!(l >= 0.0) || !std::isfinite(l)) throw BadLabels("lambda entries must be >= 0");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw BadLabels("mu must be >= 0");
  if (!(u_step_size > 0.0) || !(w_step_size > 0.0))
    throw BadLabels("step sizes must be positive");
  if (!(epsilon_denom > 0.0)) throw BadLabels("epsilon_denom must be positive");
  if (max_outer < 1 || max_u_iters < 1 || max_w_passes < 1)
    throw BadLabels("iteration limits must be >= 1");
  if (!(tol > 0.0)) throw BadLabels("tol must be positive");
  if (u_restarts < 1) throw BadLabels("u_restarts must be >= 1");
}

std::vector<int> hard_assignment(const Membership& membership) {
  if (membership.rows() == 0 || membership.cols() == 0)
    throw DimensionMismatch("hard_assignment on empty membership");
  std::vector<int> groups(static_cast<std::size_t>(membership.cols()));
  for (Eigen::Index t = 0; t < membership.cols(); ++t) {
    int best = 0;
    for (Eigen::Index g = 1; g < membership.rows(); ++g)
      if (membership(g, t) > membership(best, t)) best = static_cast<int>(g);
    groups[static_cast<std::size_t>(t)] = best;
  }
  return groups;
}

}  // namespace sgmtl
