#pragma once

#include "sgmtl/rng.hpp"
#include "sgmtl/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

// Synthetic problem generation with known group structure: tasks fall into
// n_groups_true equal blocks; each group has a fixed feature support; task
// weights are standard normal on their group's support and exactly zero off
// it; features are i.i.d. standard normal and targets carry additive
// N(0, noise_sigma^2) noise.
namespace sgmtl {

struct SyntheticSpec {
  int m = 30;            // tasks
  int n_per_task = 15;   // examples per task
  int d = 21;            // features
  int n_groups_true = 3;
  int support_size = 7;  // nonzeros per group support
  // Fraction of the support shared with each circularly adjacent group.
  double overlap_fraction = 0.0;
  double noise_sigma = 0.5;
  std::uint64_t seed = 0;

  // Throws InfeasibleSpec when the supports cannot be laid out (overlap
  // exceeding half the support, supports exceeding d, tasks not divisible
  // into equal groups) and BadLabels on non-positive sizes.
  void validate() const;
};

struct GroundTruth {
  WeightMatrix weights;                    // d x m generating weights
  std::vector<int> group_of_task;          // size m
  std::vector<std::vector<int>> supports;  // per group, sorted feature ids
};

// Fully custom generator.
std::pair<Problem, GroundTruth> make_custom(const SyntheticSpec& spec);

// Small regime: m=30 tasks in 3 groups, d=21, n=15, disjoint supports of 7.
std::pair<Problem, GroundTruth> make_set1(std::uint64_t seed);

// Larger regime: m=30 tasks in 5 groups, d=150, n=100, supports of 30 with
// 30% overlap between circularly adjacent groups.
std::pair<Problem, GroundTruth> make_set2(std::uint64_t seed);

// Draws a fresh sample (new X and noise) from an existing ground truth,
// e.g. held-out test data for sweeps.
Problem sample_problem(const GroundTruth& truth, int n_per_task, double noise_sigma,
                       std::uint64_t seed);

}  // namespace sgmtl
