#pragma once

#include "sgmtl/types.hpp"

#include <vector>

// Structural diagnostics: checkable consequences of the regularizer's shape
// (when merging or splitting hard groups must lower it) and the capacity
// bound used to reason about sample complexity.
namespace sgmtl {

// Unsquared hard-assignment regularizer value lambda * sum_g ||W restricted
// to group g||_{1,2}: with columns grouped by `groups`, each group g
// contributes sum_j sqrt(sum_{t in g} w_{j,t}^2). Exposed for tests.
double hard_group_norm_sum(const WeightMatrix& weights, const std::vector<int>& groups,
                           double lambda);

// Squared variant: lambda * sum_g (sum_j sqrt(sum_{t in g} w_{j,t}^2))^2.
double hard_group_norm_sum_squared(const WeightMatrix& weights, const std::vector<int>& groups,
                                   double lambda);

// Tasks s and t sit in different groups and share at least one feature where
// both weights are nonzero: merging t's group into s's must strictly lower
// the unsquared regularizer. Returns whether it did. Throws
// PreconditionViolated when the premise does not hold.
bool check_merge_proposition(const WeightMatrix& weights, const std::vector<int>& groups, int s,
                             int t, double lambda);

// Tasks s and t sit in the same group and their weight columns are not
// proportional on the group's support: moving t to a fresh empty group must
// strictly lower the squared regularizer. Returns whether it did. Throws
// PreconditionViolated when the premise does not hold (including columns
// that are proportional on the support).
bool check_split_proposition(const WeightMatrix& weights, const std::vector<int>& groups, int s,
                             int t, double lambda);

// Rademacher-complexity bound for the shared-support function class:
//   2 * x_inf_bound * sqrt(ln(2 n d) / n) * (sum_g alpha_g) / m.
// Throws BadLabels on non-positive n, d, m or negative alpha entries.
double rademacher_bound(double x_inf_bound, int n, int d, int m,
                        const std::vector<double>& alpha);

}  // namespace sgmtl
