#pragma once

// Independent oracles the unit and acceptance tests check against: finite
// differences, brute-force grids, exhaustive enumeration, and closed-form
// solvers. Nothing here calls into the optimized implementation paths.

#include "sgmtl/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace oracles {

// Central finite difference of a scalar functional over one membership entry.
inline double fd_membership(const std::function<double(const sgmtl::Membership&)>& f,
                            const sgmtl::Membership& at, Eigen::Index g, Eigen::Index t,
                            double h = 1e-6) {
  sgmtl::Membership up = at, down = at;
  up(g, t) += h;
  down(g, t) -= h;
  return (f(up) - f(down)) / (2.0 * h);
}

// Central finite difference over one weight entry.
inline double fd_weight(const std::function<double(const sgmtl::WeightMatrix&)>& f,
                        const sgmtl::WeightMatrix& at, Eigen::Index j, Eigen::Index t,
                        double h = 1e-6) {
  sgmtl::WeightMatrix up = at, down = at;
  up(j, t) += h;
  down(j, t) -= h;
  return (f(up) - f(down)) / (2.0 * h);
}

// Brute-force simplex projection: the projection has the form
// max(v - theta, 0) for a scalar theta; scan theta on a fine grid and keep
// the feasible point closest to v. Grid resolution 1e-3 of the scan range.
inline Eigen::VectorXd simplex_grid_projection(const Eigen::VectorXd& v) {
  const double lo = v.minCoeff() - 1.0;
  const double hi = v.maxCoeff();
  const int steps = static_cast<int>(std::ceil((hi - lo) / 1e-3));
  double best_theta = lo;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int s = 0; s <= steps; ++s) {
    const double theta = lo + (hi - lo) * s / steps;
    const double sum = (v.array() - theta).max(0.0).sum();
    const double gap = std::abs(sum - 1.0);
    if (gap < best_gap) {
      best_gap = gap;
      best_theta = theta;
    }
  }
  Eigen::VectorXd out = (v.array() - best_theta).max(0.0);
  return out;
}

// Grid minimizer of 0.5*(x-a)^2 + nu*|x|.
inline double soft_threshold_grid(double a, double nu, double resolution = 1e-4) {
  const double lo = -std::abs(a) - 1.0;
  const double hi = std::abs(a) + 1.0;
  const int steps = static_cast<int>(std::ceil((hi - lo) / resolution));
  double best_x = lo, best_v = std::numeric_limits<double>::infinity();
  for (int s = 0; s <= steps; ++s) {
    const double x = lo + (hi - lo) * s / steps;
    const double v = 0.5 * (x - a) * (x - a) + nu * std::abs(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return best_x;
}

// Dense least squares via normal equations.
inline Eigen::VectorXd least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  return (X.transpose() * X).ldlt().solve(X.transpose() * y);
}

// Textbook elastic-net coordinate fixed point for squared loss:
// w_j = S_{l1}(z_j w_j - g_j) / (z_j + l2), z_j = ||x_j||^2 / n,
// g_j = (1/n) x_j . (Xw - y). Returns the residual |w_j - update|.
inline double enet_fixed_point_residual(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& w, Eigen::Index j, double l1,
                                        double l2) {
  const double n = static_cast<double>(X.rows());
  const double z = X.col(j).squaredNorm() / n;
  const double g = X.col(j).dot(X * w - y) / n;
  const double target = z * w[j] - g;
  const double shrunk = target > l1 ? target - l1 : (target < -l1 ? target + l1 : 0.0);
  return std::abs(w[j] - shrunk / (z + l2));
}

// Proximal operator of c * (sum_j alpha_j)^2 over row norms: given the row
// norms b of the input, the output row norms are alpha_j = max(b_j - 2cT, 0)
// with T the unique fixed point of T = sum_j max(b_j - 2cT, 0). Solved by
// sorting and segment search.
inline Eigen::VectorXd squared_l1_of_norms_prox(const Eigen::VectorXd& b, double c) {
  if (c <= 0.0) return b;
  std::vector<double> sorted(b.data(), b.data() + b.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double prefix = 0.0;
  double T = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    prefix += sorted[k];
    const double candidate = prefix / (1.0 + 2.0 * c * static_cast<double>(k + 1));
    const double threshold = 2.0 * c * candidate;
    const bool k_active = sorted[k] > threshold;
    const bool next_inactive = k + 1 >= sorted.size() || sorted[k + 1] <= threshold;
    if (k_active && next_inactive) {
      T = candidate;
      break;
    }
  }
  return (b.array() - 2.0 * c * T).max(0.0);
}

// Reference solver for a single-group squared-penalty problem:
//   min_W sum_t loss_t(w_t) + lam * (sum_j ||W_j||_2)^2
// by proximal gradient with backtracking, run to a tight tolerance.
// Squared loss only. Returns the final weights.
inline Eigen::MatrixXd single_group_squared_solver(const sgmtl::Problem& problem, double lam,
                                                   int max_iters = 20000, double tol = 1e-12) {
  const Eigen::Index d = problem.d();
  const Eigen::Index m = problem.m();
  auto smooth = [&](const Eigen::MatrixXd& w) {
    double total = 0.0;
    for (Eigen::Index t = 0; t < m; ++t) {
      const auto& task = problem.tasks[static_cast<std::size_t>(t)];
      total += (task.targets - task.features * w.col(t)).squaredNorm() /
               (2.0 * static_cast<double>(task.n()));
    }
    return total;
  };
  auto grad = [&](const Eigen::MatrixXd& w) {
    Eigen::MatrixXd g(d, m);
    for (Eigen::Index t = 0; t < m; ++t) {
      const auto& task = problem.tasks[static_cast<std::size_t>(t)];
      g.col(t) = task.features.transpose() * (task.features * w.col(t) - task.targets) /
                 static_cast<double>(task.n());
    }
    return g;
  };
  auto penalty = [&](const Eigen::MatrixXd& w) {
    const double s = w.rowwise().norm().sum();
    return lam * s * s;
  };
  auto prox = [&](const Eigen::MatrixXd& w, double step) {
    const Eigen::VectorXd b = w.rowwise().norm();
    const Eigen::VectorXd alpha = squared_l1_of_norms_prox(b, lam * step);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, m);
    for (Eigen::Index j = 0; j < d; ++j)
      if (b[j] > 0.0 && alpha[j] > 0.0) out.row(j) = w.row(j) * (alpha[j] / b[j]);
    return out;
  };

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, m);
  double f = smooth(w);
  double objective = f + penalty(w);
  double step = 1.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    const Eigen::MatrixXd g = grad(w);
    Eigen::MatrixXd cand;
    double f_cand = 0.0;
    bool ok = false;
    for (int h = 0; h < 60; ++h) {
      cand = prox(w - step * g, step);
      const Eigen::MatrixXd delta = cand - w;
      f_cand = smooth(cand);
      if (f_cand <= f + g.cwiseProduct(delta).sum() + delta.squaredNorm() / (2.0 * step) + 1e-14) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
    const double new_objective = f_cand + penalty(cand);
    const double drop = objective - new_objective;
    w = cand;
    f = f_cand;
    objective = new_objective;
    step = std::min(step * 1.25, 1e6);
    if (drop >= 0.0 && drop < tol * std::max(1.0, std::abs(objective))) break;
  }
  return w;
}

// O(n^2) precision-recall area: one threshold per distinct score.
inline double auc_pr_brute(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  std::vector<double> thresholds(scores.data(), scores.data() + scores.size());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<double>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  double positives = 0.0;
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels[i] == 1.0) positives += 1.0;

  double area = 0.0, prev_recall = 0.0;
  for (double threshold : thresholds) {
    double tp = 0.0, fp = 0.0;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
      if (scores[i] >= threshold) {
        if (labels[i] == 1.0)
          tp += 1.0;
        else
          fp += 1.0;
      }
    }
    const double recall = tp / positives;
    const double precision = tp / (tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return area;
}

// Pair-counting adjusted Rand index, straight from the definition.
inline double ari_pairs(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  double both = 0.0, in_a = 0.0, in_b = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool same_a = a[i] == a[j];
      const bool same_b = b[i] == b[j];
      total += 1.0;
      if (same_a) in_a += 1.0;
      if (same_b) in_b += 1.0;
      if (same_a && same_b) both += 1.0;
    }
  const double expected = in_a * in_b / total;
  const double maximum = 0.5 * (in_a + in_b);
  if (maximum == expected) return 1.0;
  return (both - expected) / (maximum - expected);
}

// Exhaustive min-cost assignment for small square matrices.
inline double assignment_brute(const Eigen::MatrixXd& cost) {
  std::vector<int> perm(static_cast<std::size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i)
      total += cost(static_cast<Eigen::Index>(i), perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace oracles
