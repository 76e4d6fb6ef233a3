#include "sgmtl/solver.hpp"

#include "sgmtl/baselines.hpp"
#include "sgmtl/objective.hpp"
#include "sgmtl/rng.hpp"
#include "sgmtl/u_step.hpp"
#include "sgmtl/w_step.hpp"

#include <cmath>
#include <utility>

namespace sgmtl {

std::pair<WeightMatrix, Membership> initialize(const Problem& problem, const SolverConfig& config,
                                               const InitStrategy& init) {
  WeightMatrix weights;
  switch (init.kind) {
    case InitKind::zeros:
      weights = WeightMatrix::Zero(problem.d(), problem.m());
      break;
    case InitKind::given:
      if (init.given_weights.rows() != problem.d() || init.given_weights.cols() != problem.m())
        throw DimensionMismatch("given initial weights do not match problem shape");
      weights = init.given_weights;
      break;
    case InitKind::stl_warm_start: {
      ElasticNetConfig enet;
      enet.l1 = init.stl_l1;
      enet.l2 = init.stl_l2;
      weights = fit_stl(problem, enet);
      break;
    }
  }

  Membership membership(config.n_groups, problem.m());
  for (Eigen::Index t = 0; t < problem.m(); ++t) {
    const std::uint64_t task_salt = fnv1a(problem.tasks[static_cast<std::size_t>(t)].task_id);
    Rng rng(mix_seed(config.seed, 0x696e6974ull /* "init" */, task_salt));
    membership.col(t) = rng.simplex_uniform(config.n_groups);
  }
  return {std::move(weights), std::move(membership)};
}

FitResult fit(const Problem& problem, const SolverConfig& config, const InitStrategy& init) {
  validate_problem(problem);
  config.validate();

  auto [weights, membership] = initialize(problem, config, init);

  FitResult result;
  result.objective_trace.push_back(total_objective(problem, weights, membership, config).total);

  for (int outer = 1; outer <= config.max_outer; ++outer) {
    const double before = result.objective_trace.back();

    UStepReport u_report =
        u_step(problem, weights, membership, config, static_cast<std::uint64_t>(outer));
    membership = std::move(u_report.final_membership);
    result.objective_trace.push_back(u_report.objective_after);

    w_step(problem, weights, membership, config);
    result.objective_trace.push_back(total_objective(problem, weights, membership, config).total);

    result.iterations = outer;
    const double after = result.objective_trace.back();
    if (!std::isfinite(after)) throw NonFinite("objective diverged during fit");
    if (before - after < config.tol * std::max(1.0, std::abs(before))) {
      result.converged = true;
      break;
    }
  }

  result.weights = std::move(weights);
  result.membership = std::move(membership);
  result.hard_groups = hard_assignment(result.membership);
  return result;
}

Eigen::VectorXd predict(const WeightMatrix& weights, const TaskDataset& data, Eigen::Index t) {
  if (t < 0 || t >= weights.cols())
    throw DimensionMismatch("task index out of range in predict");
  if (data.d() != weights.rows())
    throw DimensionMismatch("feature count does not match weights in predict");
  return data.features * weights.col(t);
}

}  // namespace sgmtl
