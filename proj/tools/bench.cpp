// Times the OpenMP kernels against their serial reference twins on a
// set-2-sized instance. Usage: sgmtl_bench [repeats]
#include "sgmtl/datagen.hpp"
#include "sgmtl/objective.hpp"
#include "sgmtl/reference.hpp"
#include "sgmtl/rng.hpp"
#include "sgmtl/u_step.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(int repeats, const std::function<void()>& body) {
  // One warmup, then best-of-3 averages.
  body();
  double best = 1e300;
  for (int round = 0; round < 3; ++round) {
    const auto start = Clock::now();
    for (int r = 0; r < repeats; ++r) body();
    const double ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count() / repeats;
    if (ms < best) best = ms;
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int repeats = 20;
  if (argc > 1) {
    repeats = std::atoi(argv[1]);
    if (repeats < 1) {
      std::fprintf(stderr, "usage: %s [repeats >= 1]\n", argv[0]);
      return 2;
    }
  }

  auto [problem, truth] = sgmtl::make_set2(7);
  sgmtl::SolverConfig config;
  config.n_groups = 5;
  config.lambda = {1e-4};
  config.mu = 1e-3;

  sgmtl::Rng rng(11);
  const sgmtl::WeightMatrix weights = truth.weights + 0.1 * rng.normal_matrix(
      truth.weights.rows(), truth.weights.cols());
  sgmtl::Membership membership(config.n_groups, problem.m());
  for (Eigen::Index t = 0; t < problem.m(); ++t)
    membership.col(t) = rng.simplex_uniform(config.n_groups);

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("set-2 instance: m=%d d=%d n=%d, %d thread(s), %d repeats\n",
              static_cast<int>(problem.m()), static_cast<int>(problem.d()),
              static_cast<int>(problem.tasks.front().n()), threads, repeats);

  double sink = 0.0;  // keep results alive
  const double obj_par = time_ms(repeats, [&] {
    sink += sgmtl::total_objective(problem, weights, membership, config).total;
  });
  const double obj_ser = time_ms(repeats, [&] {
    sink += sgmtl::reference::total_objective(problem, weights, membership, config);
  });
  std::printf("%-28s %10.3f ms   serial %10.3f ms   speedup %.2fx\n", "total_objective",
              obj_par, obj_ser, obj_ser / obj_par);

  const double grad_par = time_ms(repeats, [&] {
    sink += sgmtl::grad_regularizer_u(weights, membership, config.lambda, config.epsilon_denom)
                .sum();
  });
  const double grad_ser = time_ms(repeats, [&] {
    sink += sgmtl::reference::grad_regularizer_u(weights, membership, config.lambda,
                                                 config.epsilon_denom)
                .sum();
  });
  std::printf("%-28s %10.3f ms   serial %10.3f ms   speedup %.2fx\n", "grad_regularizer_u",
              grad_par, grad_ser, grad_ser / grad_par);

  // u_step runs its restarts in parallel; compare against a single restart
  // scaled by the restart count as the serial stand-in.
  sgmtl::SolverConfig one_restart = config;
  one_restart.u_restarts = 1;
  const int u_repeats = repeats > 5 ? 5 : repeats;
  const double ustep_par = time_ms(u_repeats, [&] {
    sink += sgmtl::u_step(problem, weights, membership, config).objective_after;
  });
  const double ustep_one = time_ms(u_repeats, [&] {
    sink += sgmtl::u_step(problem, weights, membership, one_restart).objective_after;
  });
  std::printf("%-28s %10.3f ms   1-restart %8.3f ms   (%d restarts)\n", "u_step",
              ustep_par, ustep_one, config.u_restarts);

  std::printf("checksum %.6f\n", sink);
  return 0;
}
