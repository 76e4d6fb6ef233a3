// ---------------------------------------------------------------
// Optimized kernels vs. the naive serial reference, including
// invariance to the OpenMP thread count.
// ---------------------------------------------------------------

#include "fixtures.hpp"
#include "sgmtl/objective.hpp"
#include "sgmtl/reference.hpp"
#include "sgmtl/u_step.hpp"

#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <tuple>

using namespace sgmtl;

namespace {

struct Instance {
  Problem problem;
  WeightMatrix weights;
  Membership membership;
  SolverConfig config;
};

Instance make_instance(std::uint64_t seed, Eigen::Index m, Eigen::Index n, Eigen::Index d,
                       int n_groups) {
  Instance inst;
  inst.problem = fixtures::random_problem(m, n, d, seed);
  Rng rng(seed + 1000);
  inst.weights = rng.normal_matrix(d, m);
  // Sparsify a bit so zero rows exercise the clamped denominators.
  for (Eigen::Index j = 0; j < d; ++j)
    if (rng.uniform() < 0.3) inst.weights.row(j).setZero();
  inst.membership = fixtures::random_interior_membership(n_groups, m, seed + 2000);
  inst.config.n_groups = n_groups;
  inst.config.lambda = {0.2};
  inst.config.mu = 0.03;
  return inst;
}

}  // namespace

TEST_CASE("objective kernels agree with the naive reference") {
  for (std::uint64_t seed : {10ull, 11ull, 12ull, 13ull, 14ull, 15ull}) {
    Instance inst = make_instance(seed, 6, 9, 7, 3);
    const ObjectiveBreakdown fast =
        total_objective(inst.problem, inst.weights, inst.membership, inst.config);
    CHECK(fast.total ==
          doctest::Approx(reference::total_objective(inst.problem, inst.weights, inst.membership,
                                                     inst.config))
              .epsilon(1e-12));
    CHECK(fast.regularizer ==
          doctest::Approx(reference::regularizer(inst.weights, inst.membership, inst.config.lambda))
              .epsilon(1e-12));
    CHECK(fast.fusion ==
          doctest::Approx(reference::fusion_penalty(inst.membership, inst.config.mu))
              .epsilon(1e-12));
    for (int g = 0; g < 3; ++g)
      CHECK(group_norm(inst.weights, inst.membership, g) ==
            doctest::Approx(reference::group_norm(inst.weights, inst.membership, g))
                .epsilon(1e-12));
    for (const auto& task : inst.problem.tasks) {
      const Eigen::Index t = &task - inst.problem.tasks.data();
      CHECK(task_loss(task, inst.weights.col(t)) ==
            doctest::Approx(reference::task_loss(task, inst.weights.col(t))).epsilon(1e-12));
    }
  }
}

TEST_CASE("membership gradient kernels agree with the naive reference") {
  for (std::uint64_t seed : {21ull, 22ull, 23ull, 24ull}) {
    Instance inst = make_instance(seed, 5, 8, 10, 4);
    const Eigen::MatrixXd fast =
        grad_regularizer_u(inst.weights, inst.membership, inst.config.lambda, 1e-10);
    const Eigen::MatrixXd naive =
        reference::grad_regularizer_u(inst.weights, inst.membership, inst.config.lambda, 1e-10);
    REQUIRE(fast.rows() == naive.rows());
    REQUIRE(fast.cols() == naive.cols());
    CHECK((fast - naive).cwiseAbs().maxCoeff() <
          1e-10 * std::max(1.0, naive.cwiseAbs().maxCoeff()));

    const Eigen::MatrixXd fast_fusion = grad_fusion_u(inst.membership, inst.config.mu);
    const Eigen::MatrixXd naive_fusion =
        reference::grad_fusion_u(inst.membership, inst.config.mu);
    CHECK((fast_fusion - naive_fusion).cwiseAbs().maxCoeff() <
          1e-12 * std::max(1.0, naive_fusion.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("results do not depend on the OpenMP thread count") {
  Instance inst = make_instance(99, 8, 12, 9, 3);

#ifdef _OPENMP
  const int saved = omp_get_max_threads();
#endif

  auto run_all = [&]() {
    const ObjectiveBreakdown b =
        total_objective(inst.problem, inst.weights, inst.membership, inst.config);
    const Eigen::MatrixXd g =
        grad_regularizer_u(inst.weights, inst.membership, inst.config.lambda, 1e-10);
    const UStepReport u = u_step(inst.problem, inst.weights, inst.membership, inst.config, 7);
    return std::make_tuple(b.total, g, u.final_membership, u.objective_after, u.restart_index);
  };

#ifdef _OPENMP
  omp_set_num_threads(1);
#endif
  const auto serial = run_all();
#ifdef _OPENMP
  omp_set_num_threads(4);
#endif
  const auto parallel = run_all();
#ifdef _OPENMP
  omp_set_num_threads(saved);
#endif

  // Bitwise identical: reductions are ordered, parallel loops only fill
  // disjoint slots.
  CHECK(std::get<0>(serial) == std::get<0>(parallel));
  CHECK(std::get<1>(serial) == std::get<1>(parallel));
  CHECK(std::get<2>(serial) == std::get<2>(parallel));
  CHECK(std::get<3>(serial) == std::get<3>(parallel));
  CHECK(std::get<4>(serial) == std::get<4>(parallel));
}
