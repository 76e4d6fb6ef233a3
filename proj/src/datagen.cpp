#include "sgmtl/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sgmtl {

namespace {

std::string task_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "task_%02d", index);
  return buf;
}

// Circularly overlapping supports laid out in feature order: each group owns
// a unique block followed by the block it shares with the next group.
std::vector<std::vector<int>> build_supports(int n_groups, int support_size, int overlap) {
  std::vector<std::vector<int>> supports(static_cast<std::size_t>(n_groups));
  if (n_groups == 1) {
    supports[0].resize(static_cast<std::size_t>(support_size));
    for (int j = 0; j < support_size; ++j) supports[0][static_cast<std::size_t>(j)] = j;
    return supports;
  }
  if (n_groups == 2) {
    // Two groups share a single block of `overlap` features.
    const int unique = support_size - overlap;
    for (int g = 0; g < 2; ++g) {
      auto& s = supports[static_cast<std::size_t>(g)];
      for (int j = 0; j < unique; ++j) s.push_back(g * unique + j);
      for (int j = 0; j < overlap; ++j) s.push_back(2 * unique + j);
      std::sort(s.begin(), s.end());
    }
    return supports;
  }
  // n_groups >= 3: per group, `unique` owned features then `overlap` shared
  // with the circular successor.
  const int unique = support_size - 2 * overlap;
  const int stride = unique + overlap;
  auto shared_start = [&](int g) { return g * stride + unique; };
  for (int g = 0; g < n_groups; ++g) {
    auto& s = supports[static_cast<std::size_t>(g)];
    for (int j = 0; j < unique; ++j) s.push_back(g * stride + j);
    for (int j = 0; j < overlap; ++j) s.push_back(shared_start(g) + j);          // with g+1
    const int prev = (g + n_groups - 1) % n_groups;
    for (int j = 0; j < overlap; ++j) s.push_back(shared_start(prev) + j);       // with g-1
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return supports;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (m < 1 || n_per_task < 1 || d < 1 || n_groups_true < 1 || support_size < 1)
    throw BadLabels("synthetic spec sizes must be positive");
  if (!(noise_sigma >= 0.0)) throw BadLabels("noise_sigma must be >= 0");
  if (overlap_fraction < 0.0 || overlap_fraction >= 1.0)
    throw BadLabels("overlap_fraction must be in [0, 1)");
  if (m % n_groups_true != 0)
    throw InfeasibleSpec("m must divide evenly into n_groups_true groups");
  if (support_size > d) throw InfeasibleSpec("support_size exceeds feature count");

  const int overlap = static_cast<int>(std::lround(overlap_fraction * support_size));
  if (n_groups_true == 1) return;
  if (n_groups_true == 2) {
    if (overlap > support_size) throw InfeasibleSpec("overlap exceeds support");
    if (2 * (support_size - overlap) + overlap > d)
      throw InfeasibleSpec("supports do not fit into d features");
    return;
  }
  if (2 * overlap > support_size)
    throw InfeasibleSpec("overlap blocks exceed the support size");
  if (n_groups_true * (support_size - overlap) > d)
    throw InfeasibleSpec("supports do not fit into d features");
}

std::pair<Problem, GroundTruth> make_custom(const SyntheticSpec& spec) {
  spec.validate();

  const int overlap = static_cast<int>(std::lround(spec.overlap_fraction * spec.support_size));

  GroundTruth truth;
  truth.supports = build_supports(spec.n_groups_true, spec.support_size, overlap);
  truth.group_of_task.resize(static_cast<std::size_t>(spec.m));
  const int per_group = spec.m / spec.n_groups_true;
  for (int t = 0; t < spec.m; ++t)
    truth.group_of_task[static_cast<std::size_t>(t)] = t / per_group;

  truth.weights = WeightMatrix::Zero(spec.d, spec.m);
  Rng truth_rng(mix_seed(spec.seed, 0x747275ull /* "tru" */));
  for (int t = 0; t < spec.m; ++t) {
    const auto& support = truth.supports[static_cast<std::size_t>(
        truth.group_of_task[static_cast<std::size_t>(t)])];
    for (int j : support) truth.weights(j, t) = truth_rng.normal();
  }

  Problem problem = sample_problem(truth, spec.n_per_task, spec.noise_sigma,
                                   mix_seed(spec.seed, 0x646174ull /* "dat" */));
  return {std::move(problem), std::move(truth)};
}

std::pair<Problem, GroundTruth> make_set1(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.m = 30;
  spec.n_per_task = 15;
  spec.d = 21;
  spec.n_groups_true = 3;
  spec.support_size = 7;
  spec.overlap_fraction = 0.0;
  spec.noise_sigma = 0.5;
  spec.seed = seed;
  return make_custom(spec);
}

std::pair<Problem, GroundTruth> make_set2(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.m = 30;
  spec.n_per_task = 100;
  spec.d = 150;
  spec.n_groups_true = 5;
  spec.support_size = 30;
  spec.overlap_fraction = 0.3;
  spec.noise_sigma = 0.5;
  spec.seed = seed;
  return make_custom(spec);
}

Problem sample_problem(const GroundTruth& truth, int n_per_task, double noise_sigma,
                       std::uint64_t seed) {
  if (n_per_task < 1) throw BadLabels("n_per_task must be positive");
  const Eigen::Index d = truth.weights.rows();
  const Eigen::Index m = truth.weights.cols();

  Problem problem;
  problem.tasks.resize(static_cast<std::size_t>(m));
  for (Eigen::Index t = 0; t < m; ++t) {
    // Independent stream per task: sizes of other tasks never shift draws.
    Rng rng(mix_seed(seed, 0x74736bull /* "tsk" */, static_cast<std::uint64_t>(t)));
    TaskDataset& task = problem.tasks[static_cast<std::size_t>(t)];
    task.task_id = task_name(static_cast<int>(t));
    task.loss = LossKind::squared;
    task.features = rng.normal_matrix(n_per_task, d);
    task.targets = task.features * truth.weights.col(t);
    for (Eigen::Index i = 0; i < task.targets.size(); ++i)
      task.targets[i] += noise_sigma * rng.normal();
  }
  return problem;
}

}  // namespace sgmtl
