#pragma once

#include "sgmtl/types.hpp"

// Alternating minimization driver: initialize (W, U), then repeat
// U step / W step, recording the full objective after every half-step,
// until the relative objective change over an outer iteration falls below
// config.tol or config.max_outer is reached.
namespace sgmtl {

enum class InitKind { stl_warm_start, zeros, given };

struct InitStrategy {
  InitKind kind = InitKind::stl_warm_start;
  // Elastic-net penalties for the per-task warm start fits.
  double stl_l1 = 0.01;
  double stl_l2 = 0.01;
  // Used only with InitKind::given.
  WeightMatrix given_weights;
};

// W per the strategy; U columns drawn uniformly on the simplex from
// (config.seed, task id). Throws DimensionMismatch if given weights do not
// match the problem.
std::pair<WeightMatrix, Membership> initialize(const Problem& problem, const SolverConfig& config,
                                               const InitStrategy& init);

// Full alternating fit. The objective trace is non-increasing within
// line-search slack; converged means the relative-change stop fired before
// max_outer. Throws on invalid problems/configs and NonFinite if the
// objective degenerates.
FitResult fit(const Problem& problem, const SolverConfig& config,
              const InitStrategy& init = InitStrategy{});

// X * w_t for task t's feature matrix (scores for logistic tasks).
Eigen::VectorXd predict(const WeightMatrix& weights, const TaskDataset& data, Eigen::Index t);

}  // namespace sgmtl
