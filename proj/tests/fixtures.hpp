#pragma once

// Small helpers for building random problem instances in tests.

#include "sgmtl/rng.hpp"
#include "sgmtl/types.hpp"

#include <cstdio>
#include <string>

namespace fixtures {

// A random squared-loss problem with dense Gaussian weights behind it.
inline sgmtl::Problem random_problem(Eigen::Index m, Eigen::Index n, Eigen::Index d,
                                     std::uint64_t seed, sgmtl::LossKind loss = sgmtl::LossKind::squared,
                                     double noise = 0.1) {
  sgmtl::Problem problem;
  for (Eigen::Index t = 0; t < m; ++t) {
    sgmtl::Rng rng(sgmtl::mix_seed(seed, 0x7072626cULL, static_cast<std::uint64_t>(t)));
    sgmtl::TaskDataset task;
    char name[32];
    std::snprintf(name, sizeof(name), "task_%02d", static_cast<int>(t));
    task.task_id = name;
    task.loss = loss;
    task.features = rng.normal_matrix(n, d);
    const Eigen::VectorXd w = rng.normal_vector(d);
    Eigen::VectorXd signal = task.features * w;
    for (Eigen::Index i = 0; i < n; ++i) signal[i] += noise * rng.normal();
    if (loss == sgmtl::LossKind::logistic) {
      task.targets = (signal.array() >= 0.0).select(Eigen::VectorXd::Ones(n), -Eigen::VectorXd::Ones(n));
    } else {
      task.targets = signal;
    }
    problem.tasks.push_back(std::move(task));
  }
  return problem;
}

// Random membership matrix with columns on the simplex, entries kept away
// from the boundary by `floor` (useful for finite-difference checks).
inline sgmtl::Membership random_interior_membership(Eigen::Index n_groups, Eigen::Index m,
                                                    std::uint64_t seed, double floor = 5e-3) {
  sgmtl::Rng rng(seed);
  sgmtl::Membership u(n_groups, m);
  for (Eigen::Index t = 0; t < m; ++t) {
    Eigen::VectorXd col = rng.simplex_uniform(n_groups);
    col = col.array() + floor;
    col /= col.sum();
    u.col(t) = col;
  }
  return u;
}

}  // namespace fixtures
