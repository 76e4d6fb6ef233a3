#pragma once

#include "sgmtl/types.hpp"

#include <vector>

// Serial reference kernels: straight-line loop implementations of the
// objective pieces, kept deliberately naive (no Eigen expressions, no
// OpenMP, no incremental state). The unit tests compare the optimized
// kernels against these, and tools/bench times the two side by side.
namespace sgmtl::reference {

double task_loss(const TaskDataset& data, const Eigen::VectorXd& w);

double group_norm(const WeightMatrix& weights, const Membership& membership, int group);

double regularizer(const WeightMatrix& weights, const Membership& membership,
                   const std::vector<double>& lambda);

double fusion_penalty(const Membership& membership, double mu);

double total_objective(const Problem& problem, const WeightMatrix& weights,
                       const Membership& membership, const SolverConfig& config);

Eigen::MatrixXd grad_regularizer_u(const WeightMatrix& weights, const Membership& membership,
                                   const std::vector<double>& lambda, double epsilon_denom);

Eigen::MatrixXd grad_fusion_u(const Membership& membership, double mu);

}  // namespace sgmtl::reference
