#pragma once

#include "sgmtl/types.hpp"

#include <vector>

// Weight (W) update: proximal coordinate descent with U fixed. For a
// coordinate (j, t) the regularizer splits by
//   kappa_g = sum_{t' != t} u_{g,t'} w_{j,t'}^2
// into groups where the coordinate's row norm vanishes with the coordinate
// (kappa_g == 0, exactly representable: a sum of non-negative terms) and
// groups where it stays smooth (kappa_g > 0). The former contribute an L1
// term with constant lambda_bar, the latter a smooth term; the loss plus the
// smooth pieces are handled by gradient + backtracking, the L1 piece by soft
// thresholding.
namespace sgmtl {

struct CoordinateContext {
  Eigen::Index j = 0;  // feature
  Eigen::Index t = 0;  // task
  std::vector<double> kappa;        // per group, exact zeros preserved
  std::vector<int> g_zero;          // groups with lambda_g > 0 and kappa == 0
  std::vector<int> g_plus;          // groups with lambda_g > 0 and kappa > 0
  std::vector<double> row_factors;  // per group: sum_{j' != j} r_{g,j'}
};

// Builds the context for coordinate (j, t) from scratch.
CoordinateContext coordinate_context(const WeightMatrix& weights, const Membership& membership,
                                     const std::vector<double>& lambda, Eigen::Index j,
                                     Eigen::Index t);

// Derivative of loss + smooth regularizer pieces at the current w_{j,t}:
//   d(loss)/dw + 2 sum_g lambda_g u_{g,t} w
//             + sum_{g in g_plus} 2 lambda_g row_factors_g u_{g,t} w / sqrt(kappa_g + u_{g,t} w^2).
// With config.coord_quad_membership == false the first penalty term drops
// the u_{g,t} weight (comparison mode); the line search in coordinate_update
// still uses the true objective either way.
double smooth_gradient(const Problem& problem, const WeightMatrix& weights,
                       const Membership& membership, const SolverConfig& config,
                       Eigen::Index j, Eigen::Index t);

// lambda_bar = 2 sum_{g in g_zero} lambda_g row_factors_g sqrt(u_{g,t}); the
// L1 weight the soft threshold uses. Zero when g_zero is empty.
double threshold_constant(const WeightMatrix& weights, const Membership& membership,
                          const std::vector<double>& lambda, Eigen::Index j, Eigen::Index t);

// S_nu(a) = sign(a) * max(|a| - nu, 0). Requires nu >= 0.
double soft_threshold(double a, double nu);

// One proximal update of w_{j,t} with per-coordinate backtracking (step
// halving, at most 30 halvings, coordinate left unchanged if no candidate
// decreases the one-dimensional objective). Writes the accepted value into
// `weights` and returns it.
double coordinate_update(const Problem& problem, WeightMatrix& weights,
                         const Membership& membership, const SolverConfig& config,
                         Eigen::Index j, Eigen::Index t);

struct WStepReport {
  int passes = 0;
  double objective_delta = 0.0;  // objective after minus objective before (<= 0)
  double max_change = 0.0;       // largest |coordinate change| in the last pass
};

// Full coordinate sweeps (t outer, j inner, both ascending) until the
// largest coordinate change in a pass drops below config.tol or
// config.max_w_passes is hit.
WStepReport w_step(const Problem& problem, WeightMatrix& weights, const Membership& membership,
                   const SolverConfig& config);

}  // namespace sgmtl
