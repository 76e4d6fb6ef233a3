#include "sgmtl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace sgmtl {

namespace {

std::vector<std::vector<int>> members_by_group(const std::vector<int>& groups) {
  int max_label = 0;
  for (int g : groups) {
    if (g < 0) throw BadLabels("group labels must be >= 0");
    max_label = std::max(max_label, g);
  }
  std::vector<std::vector<int>> members(static_cast<std::size_t>(max_label) + 1);
  for (std::size_t t = 0; t < groups.size(); ++t)
    members[static_cast<std::size_t>(groups[t])].push_back(static_cast<int>(t));
  return members;
}

double group_norm_of(const WeightMatrix& weights, const std::vector<int>& members) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < weights.rows(); ++j) {
    double row = 0.0;
    for (int t : members) row += weights(j, t) * weights(j, t);
    total += std::sqrt(row);
  }
  return total;
}

void check_group_args(const WeightMatrix& weights, const std::vector<int>& groups, int s, int t) {
  if (static_cast<Eigen::Index>(groups.size()) != weights.cols())
    throw DimensionMismatch("group labels do not match weight columns");
  if (s < 0 || t < 0 || s >= static_cast<int>(groups.size()) ||
      t >= static_cast<int>(groups.size()) || s == t)
    throw PreconditionViolated("need two distinct valid task indices");
}

}  // namespace

double hard_group_norm_sum(const WeightMatrix& weights, const std::vector<int>& groups,
                           double lambda) {
  double total = 0.0;
  for (const auto& members : members_by_group(groups)) {
    if (members.empty()) continue;
    total += group_norm_of(weights, members);
  }
  return lambda * total;
}

double hard_group_norm_sum_squared(const WeightMatrix& weights, const std::vector<int>& groups,
                                   double lambda) {
  double total = 0.0;
  for (const auto& members : members_by_group(groups)) {
    if (members.empty()) continue;
    const double norm = group_norm_of(weights, members);
    total += norm * norm;
  }
  return lambda * total;
}

bool check_merge_proposition(const WeightMatrix& weights, const std::vector<int>& groups, int s,
                             int t, double lambda) {
  check_group_args(weights, groups, s, t);
  if (!(lambda > 0.0)) throw PreconditionViolated("lambda must be positive");
  if (groups[static_cast<std::size_t>(s)] == groups[static_cast<std::size_t>(t)])
    throw PreconditionViolated("merge check needs tasks in different groups");

  bool shares_feature = false;
  for (Eigen::Index j = 0; j < weights.rows(); ++j)
    if (weights(j, s) != 0.0 && weights(j, t) != 0.0) {
      shares_feature = true;
      break;
    }
  if (!shares_feature)
    throw PreconditionViolated("merge check needs a feature nonzero in both tasks");

  const double before = hard_group_norm_sum(weights, groups, lambda);
  std::vector<int> merged = groups;
  const int from = groups[static_cast<std::size_t>(t)];
  const int into = groups[static_cast<std::size_t>(s)];
  for (auto& g : merged)
    if (g == from) g = into;
  const double after = hard_group_norm_sum(weights, merged, lambda);
  return after < before;
}

bool check_split_proposition(const WeightMatrix& weights, const std::vector<int>& groups, int s,
                             int t, double lambda) {
  check_group_args(weights, groups, s, t);
  if (!(lambda > 0.0)) throw PreconditionViolated("lambda must be positive");
  if (groups[static_cast<std::size_t>(s)] != groups[static_cast<std::size_t>(t)])
    throw PreconditionViolated("split check needs tasks in the same group");

  // Support of the group: rows where any member is nonzero.
  const auto members = members_by_group(groups)[static_cast<std::size_t>(
      groups[static_cast<std::size_t>(s)])];
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < weights.rows(); ++j) {
    for (int member : members)
      if (weights(j, member) != 0.0) {
        support.push_back(j);
        break;
      }
  }
  if (support.empty())
    throw PreconditionViolated("split check needs a group with nonzero weights");

  // Columns proportional on the support make the split value-neutral; the
  // premise excludes them. Proportionality via cross products on |.|.
  double scale_s = 0.0, scale_t = 0.0;
  for (Eigen::Index j : support) {
    scale_s = std::max(scale_s, std::abs(weights(j, s)));
    scale_t = std::max(scale_t, std::abs(weights(j, t)));
  }
  bool proportional = true;
  for (std::size_t a = 0; a + 1 < support.size() && proportional; ++a)
    for (std::size_t b = a + 1; b < support.size(); ++b) {
      const double cross = std::abs(weights(support[a], s)) * std::abs(weights(support[b], t)) -
                           std::abs(weights(support[b], s)) * std::abs(weights(support[a], t));
      if (std::abs(cross) > 1e-12 * std::max(1.0, scale_s * scale_t)) {
        proportional = false;
        break;
      }
    }
  if (support.size() < 2 || proportional)
    throw PreconditionViolated("split check needs columns not proportional on the support");

  const double before = hard_group_norm_sum_squared(weights, groups, lambda);
  std::vector<int> split = groups;
  const int fresh =
      1 + *std::max_element(groups.begin(), groups.end());
  split[static_cast<std::size_t>(t)] = fresh;
  const double after = hard_group_norm_sum_squared(weights, split, lambda);
  return after < before;
}

double rademacher_bound(double x_inf_bound, int n, int d, int m,
                        const std::vector<double>& alpha) {
  if (n < 1 || d < 1 || m < 1) throw BadLabels("n, d, m must be positive");
  if (!(x_inf_bound >= 0.0)) throw BadLabels("x_inf_bound must be >= 0");
  double alpha_sum = 0.0;
  for (double a : alpha) {
    if (a < 0.0) throw BadLabels("alpha entries must be >= 0");
    alpha_sum += a;
  }
  const double nn = static_cast<double>(n);
  return 2.0 * x_inf_bound * std::sqrt(std::log(2.0 * nn * static_cast<double>(d)) / nn) *
         alpha_sum / static_cast<double>(m);
}

}  // namespace sgmtl
