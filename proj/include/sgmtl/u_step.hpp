#pragma once

#include "sgmtl/types.hpp"

#include <vector>

// Membership (U) update: projected gradient descent on
//   F(U) = regularizer(W, U) + fusion_penalty(U)
// over the product of per-column probability simplices, with backtracking
// line search and random restarts. W is fixed throughout.
namespace sgmtl {

struct UStepReport {
  Membership final_membership;
  double objective_before = 0.0;  // full objective (loss included) at entry
  double objective_after = 0.0;   // full objective at the returned U
  int iterations = 0;             // inner iterations of the winning restart
  int restart_index = 0;          // which restart won (0 = warm start)
};

// d(regularizer)/dU. Entry (g,t) = lambda_g * (sum_j r_{g,j}) *
// (sum_j w_{j,t}^2 / max(r_{g,j}, epsilon_denom)) with
// r_{g,j} = sqrt(sum_t u_{g,t} w_{j,t}^2). Only the denominators are
// clamped; a group with all-zero rows gets an exactly zero gradient.
Eigen::MatrixXd grad_regularizer_u(const WeightMatrix& weights, const Membership& membership,
                                   const std::vector<double>& lambda, double epsilon_denom);

// d(fusion)/dU. Entry (g,t) = 2 mu (m u_{g,t} - sum_{t'} u_{g,t'}).
Eigen::MatrixXd grad_fusion_u(const Membership& membership, double mu);

// Euclidean projection onto {u : u >= 0, sum u = 1} by sort-and-threshold.
// Throws DimensionMismatch on an empty vector, NonFinite on non-finite input.
Eigen::VectorXd project_column_simplex(const Eigen::VectorXd& v);

// Projects every column of a membership-shaped matrix.
Membership project_columns_simplex(const Membership& matrix);

// One full U update: u_restarts runs of projected gradient descent (restart 0
// warm-starts from `membership`, the rest start from random simplex columns
// drawn from (config.seed, round_salt, restart, task id)), keeping the best
// final F value. Ties prefer the lower restart index. The returned
// membership never has a higher full objective than the incoming one
// (within line-search slack).
UStepReport u_step(const Problem& problem, const WeightMatrix& weights,
                   const Membership& membership, const SolverConfig& config,
                   std::uint64_t round_salt = 0);

}  // namespace sgmtl
