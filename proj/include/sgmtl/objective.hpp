#pragma once

#include "sgmtl/types.hpp"

#include <vector>

// Objective evaluation: per-task losses, the membership-weighted group norm,
// the squared-L1-of-group-norms regularizer, and the membership fusion
// penalty. These are the quantities the solver's trace is built from, so
// every piece is exact (no smoothing, no clamping).
namespace sgmtl {

struct ObjectiveBreakdown {
  double loss = 0.0;
  double regularizer = 0.0;
  double fusion = 0.0;
  double total = 0.0;
};

// Squared loss: (1/(2 n_t)) * sum_i (y_i - x_i . w)^2.
// Logistic loss: (1/n_t) * sum_i log(1 + exp(-y_i x_i . w)), evaluated in a
// log1p-exp form that is stable for large |margins|.
// Throws DimensionMismatch on bad sizes, NonFinite if the value overflows.
double task_loss(const TaskDataset& data, const Eigen::VectorXd& w);

// Gradient of task_loss with respect to w (same conventions).
Eigen::VectorXd task_loss_gradient(const TaskDataset& data, const Eigen::VectorXd& w);

// ||W sqrt(U_g)||_{1,2} = sum_j sqrt(sum_t u_{g,t} w_{j,t}^2) for group g.
double group_norm(const WeightMatrix& weights, const Membership& membership, int group);

// sum_g lambda_g * group_norm(g)^2. `lambda` has size 1 (broadcast) or N.
double regularizer(const WeightMatrix& weights, const Membership& membership,
                   const std::vector<double>& lambda);

// mu * sum_{t < t'} ||U_{.,t} - U_{.,t'}||^2.
double fusion_penalty(const Membership& membership, double mu);

// Full objective: sum_t task_loss + regularizer + fusion.
// Throws DimensionMismatch if weights/membership do not match the problem,
// NonFinite if any component fails to be finite.
ObjectiveBreakdown total_objective(const Problem& problem, const WeightMatrix& weights,
                                   const Membership& membership, const SolverConfig& config);

// Expands size-1 lambda to one value per group; validates size otherwise.
Eigen::VectorXd resolve_lambda(const std::vector<double>& lambda, Eigen::Index n_groups);

}  // namespace sgmtl
