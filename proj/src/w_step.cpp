#include "sgmtl/w_step.hpp"

#include "sgmtl/objective.hpp"

#include <cassert>
#include <cmath>
#include <vector>

namespace sgmtl {

namespace {

constexpr int kMaxHalvings = 30;

// log(1 + exp(x)) without overflow.
inline double log1p_exp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// O(n) view of one task's loss as a function of single coordinates.
// Squared loss keeps the residual X w - y; logistic keeps margins y .* (X w).
struct LossState {
  const TaskDataset* data = nullptr;
  Eigen::VectorXd state;

  static LossState make(const TaskDataset& task, const Eigen::VectorXd& w) {
    LossState s;
    s.data = &task;
    if (task.loss == LossKind::squared)
      s.state = task.features * w - task.targets;
    else
      s.state = task.targets.cwiseProduct(task.features * w);
    return s;
  }

  double value() const {
    const double n = static_cast<double>(data->n());
    if (data->loss == LossKind::squared) return state.squaredNorm() / (2.0 * n);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < state.size(); ++i) sum += log1p_exp(-state[i]);
    return sum / n;
  }

  double partial(Eigen::Index j) const {
    const double n = static_cast<double>(data->n());
    if (data->loss == LossKind::squared) return data->features.col(j).dot(state) / n;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < state.size(); ++i) {
      const double z = state[i];
      const double sig = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
      sum += -data->targets[i] * sig * data->features(i, j);
    }
    return sum / n;
  }

  double value_if(Eigen::Index j, double delta) const {
    if (delta == 0.0) return value();
    const double n = static_cast<double>(data->n());
    if (data->loss == LossKind::squared)
      return (state + delta * data->features.col(j)).squaredNorm() / (2.0 * n);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < state.size(); ++i)
      sum += log1p_exp(-(state[i] + delta * data->targets[i] * data->features(i, j)));
    return sum / n;
  }

  void apply(Eigen::Index j, double delta) {
    if (delta == 0.0) return;
    if (data->loss == LossKind::squared)
      state += delta * data->features.col(j);
    else
      state += delta * data->targets.cwiseProduct(data->features.col(j));
  }
};

// One-dimensional pieces of the regularizer at a coordinate: the exact
// objective restricted to w_{j,t} is
//   loss(w) + quad_true * w^2 + sum_i plus_coef_i * sqrt(plus_kappa_i + plus_u_i w^2)
//   + lambda_bar * |w| + const.
struct ScalarTerms {
  double quad_true = 0.0;   // sum_g lambda_g u_{g,t}
  double quad_grad = 0.0;   // gradient weight (differs in comparison mode)
  double lambda_bar = 0.0;
  std::vector<double> plus_coef;   // 2 lambda_g row_factors_g
  std::vector<double> plus_kappa;  // kappa_g > 0
  std::vector<double> plus_u;      // u_{g,t}
};

double smooth_value(const ScalarTerms& terms, double w) {
  double v = terms.quad_true * w * w;
  for (std::size_t i = 0; i < terms.plus_coef.size(); ++i)
    v += terms.plus_coef[i] * std::sqrt(terms.plus_kappa[i] + terms.plus_u[i] * w * w);
  return v;
}

double smooth_grad_value(const ScalarTerms& terms, double w) {
  double g = 2.0 * terms.quad_grad * w;
  for (std::size_t i = 0; i < terms.plus_coef.size(); ++i) {
    const double denom = std::sqrt(terms.plus_kappa[i] + terms.plus_u[i] * w * w);
    // kappa > 0 keeps this denominator bounded away from zero by design.
    assert(denom >= std::sqrt(terms.plus_kappa[i]) * (1.0 - 1e-15));
    g += terms.plus_coef[i] * terms.plus_u[i] * w / denom;
  }
  return g;
}

// Proximal step on one coordinate with step halving. Returns the accepted
// value (the current one if no candidate decreased the 1-D objective).
double prox_coordinate(const LossState& loss, Eigen::Index j, double w_cur,
                       const ScalarTerms& terms, double step0) {
  const double grad = loss.partial(j) + smooth_grad_value(terms, w_cur);
  const double h_old = loss.value() + smooth_value(terms, w_cur) + terms.lambda_bar * std::abs(w_cur);

  double step = step0;
  for (int halving = 0; halving < kMaxHalvings; ++halving) {
    const double cand = soft_threshold(w_cur - step * grad, step * terms.lambda_bar);
    if (cand == w_cur) return w_cur;  // fixed point at this scale
    const double h_new =
        loss.value_if(j, cand - w_cur) + smooth_value(terms, cand) + terms.lambda_bar * std::abs(cand);
    if (h_new <= h_old) return cand;
    step *= 0.5;
  }
  return w_cur;
}

// kappa_g computed directly as a sum of non-negative terms: it is exactly
// zero iff every term is zero, so the G0/G+ split is float-exact.
double kappa_direct(const WeightMatrix& weights, const Membership& membership, Eigen::Index g,
                    Eigen::Index j, Eigen::Index t) {
  double kappa = 0.0;
  for (Eigen::Index t2 = 0; t2 < weights.cols(); ++t2) {
    if (t2 == t) continue;
    const double w = weights(j, t2);
    kappa += membership(g, t2) * w * w;
  }
  return kappa;
}

ScalarTerms build_terms(const Membership& membership, const Eigen::VectorXd& lam,
                        const CoordinateContext& ctx, Eigen::Index t, bool quad_membership) {
  ScalarTerms terms;
  for (int g : ctx.g_zero) {
    terms.quad_true += lam[g] * membership(g, t);
    terms.quad_grad += quad_membership ? lam[g] * membership(g, t) : lam[g];
    terms.lambda_bar += 2.0 * lam[g] * ctx.row_factors[static_cast<std::size_t>(g)] *
                        std::sqrt(membership(g, t));
  }
  for (int g : ctx.g_plus) {
    terms.quad_true += lam[g] * membership(g, t);
    terms.quad_grad += quad_membership ? lam[g] * membership(g, t) : lam[g];
    terms.plus_coef.push_back(2.0 * lam[g] * ctx.row_factors[static_cast<std::size_t>(g)]);
    terms.plus_kappa.push_back(ctx.kappa[static_cast<std::size_t>(g)]);
    terms.plus_u.push_back(membership(g, t));
  }
  return terms;
}

}  // namespace

CoordinateContext coordinate_context(const WeightMatrix& weights, const Membership& membership,
                                     const std::vector<double>& lambda, Eigen::Index j,
                                     Eigen::Index t) {
  if (weights.cols() != membership.cols())
    throw DimensionMismatch("weights/membership column mismatch in coordinate_context");
  if (j < 0 || j >= weights.rows() || t < 0 || t >= weights.cols())
    throw DimensionMismatch("coordinate indices out of range");
  const Eigen::Index n_groups = membership.rows();
  const Eigen::VectorXd lam = resolve_lambda(lambda, n_groups);

  CoordinateContext ctx;
  ctx.j = j;
  ctx.t = t;
  ctx.kappa.resize(static_cast<std::size_t>(n_groups));
  ctx.row_factors.resize(static_cast<std::size_t>(n_groups));
  for (Eigen::Index g = 0; g < n_groups; ++g) {
    const double kappa = kappa_direct(weights, membership, g, j, t);
    ctx.kappa[static_cast<std::size_t>(g)] = kappa;

    double sum = 0.0;  // sum over j' != j of r_{g,j'}
    for (Eigen::Index j2 = 0; j2 < weights.rows(); ++j2) {
      if (j2 == j) continue;
      double row = 0.0;
      for (Eigen::Index t2 = 0; t2 < weights.cols(); ++t2)
        row += membership(g, t2) * weights(j2, t2) * weights(j2, t2);
      sum += std::sqrt(row);
    }
    ctx.row_factors[static_cast<std::size_t>(g)] = sum;

    if (lam[g] > 0.0) {
      if (kappa == 0.0)
        ctx.g_zero.push_back(static_cast<int>(g));
      else
        ctx.g_plus.push_back(static_cast<int>(g));
    }
  }
  return ctx;
}

double smooth_gradient(const Problem& problem, const WeightMatrix& weights,
                       const Membership& membership, const SolverConfig& config,
                       Eigen::Index j, Eigen::Index t) {
  const CoordinateContext ctx = coordinate_context(weights, membership, config.lambda, j, t);
  const Eigen::VectorXd lam = resolve_lambda(config.lambda, membership.rows());
  const ScalarTerms terms = build_terms(membership, lam, ctx, t, config.coord_quad_membership);
  const LossState loss =
      LossState::make(problem.tasks[static_cast<std::size_t>(t)], weights.col(t));
  return loss.partial(j) + smooth_grad_value(terms, weights(j, t));
}

double threshold_constant(const WeightMatrix& weights, const Membership& membership,
                          const std::vector<double>& lambda, Eigen::Index j, Eigen::Index t) {
  const CoordinateContext ctx = coordinate_context(weights, membership, lambda, j, t);
  const Eigen::VectorXd lam = resolve_lambda(lambda, membership.rows());
  double bar = 0.0;
  for (int g : ctx.g_zero)
    bar += 2.0 * lam[g] * ctx.row_factors[static_cast<std::size_t>(g)] *
           std::sqrt(membership(g, t));
  return bar;
}

double soft_threshold(double a, double nu) {
  if (nu < 0.0) throw BadLabels("soft_threshold requires nu >= 0");
  if (a > nu) return a - nu;
  if (a < -nu) return a + nu;
  return 0.0;
}

double coordinate_update(const Problem& problem, WeightMatrix& weights,
                         const Membership& membership, const SolverConfig& config,
                         Eigen::Index j, Eigen::Index t) {
  const CoordinateContext ctx = coordinate_context(weights, membership, config.lambda, j, t);
  const Eigen::VectorXd lam = resolve_lambda(config.lambda, membership.rows());
  const ScalarTerms terms = build_terms(membership, lam, ctx, t, config.coord_quad_membership);
  const LossState loss =
      LossState::make(problem.tasks[static_cast<std::size_t>(t)], weights.col(t));
  const double updated = prox_coordinate(loss, j, weights(j, t), terms, config.w_step_size);
  weights(j, t) = updated;
  return updated;
}

WStepReport w_step(const Problem& problem, WeightMatrix& weights, const Membership& membership,
                   const SolverConfig& config) {
  if (weights.rows() != problem.d() || weights.cols() != problem.m())
    throw DimensionMismatch("weights shape does not match problem in w_step");
  if (membership.cols() != problem.m())
    throw DimensionMismatch("membership shape does not match problem in w_step");

  const Eigen::Index d = problem.d();
  const Eigen::Index m = problem.m();
  const Eigen::Index n_groups = membership.rows();
  const Eigen::VectorXd lam = resolve_lambda(config.lambda, n_groups);

  const double objective_before = total_objective(problem, weights, membership, config).total;

  WStepReport report;
  for (int pass = 0; pass < config.max_w_passes; ++pass) {
    ++report.passes;
    // Refresh the per-group row-norm sums S_g = sum_j r_{g,j} and the loss
    // states at every pass so incremental drift cannot accumulate.
    Eigen::VectorXd row_norm_sums = Eigen::VectorXd::Zero(n_groups);
    {
      const Eigen::MatrixXd weights_sq = weights.array().square();
      const Eigen::MatrixXd row_sq = membership * weights_sq.transpose();  // N x d
      row_norm_sums = row_sq.array().max(0.0).sqrt().rowwise().sum();
    }
    std::vector<LossState> losses;
    losses.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index t = 0; t < m; ++t)
      losses.push_back(LossState::make(problem.tasks[static_cast<std::size_t>(t)], weights.col(t)));

    double max_change = 0.0;
    CoordinateContext ctx;
    ctx.kappa.resize(static_cast<std::size_t>(n_groups));
    ctx.row_factors.resize(static_cast<std::size_t>(n_groups));
    for (Eigen::Index t = 0; t < m; ++t) {
      LossState& loss = losses[static_cast<std::size_t>(t)];
      for (Eigen::Index j = 0; j < d; ++j) {
        const double w_cur = weights(j, t);
        ctx.g_zero.clear();
        ctx.g_plus.clear();
        for (Eigen::Index g = 0; g < n_groups; ++g) {
          const double kappa = kappa_direct(weights, membership, g, j, t);
          const double r_cur = std::sqrt(kappa + membership(g, t) * w_cur * w_cur);
          ctx.kappa[static_cast<std::size_t>(g)] = kappa;
          ctx.row_factors[static_cast<std::size_t>(g)] =
              std::max(0.0, row_norm_sums[g] - r_cur);
          if (lam[g] > 0.0) {
            if (kappa == 0.0)
              ctx.g_zero.push_back(static_cast<int>(g));
            else
              ctx.g_plus.push_back(static_cast<int>(g));
          }
        }
        const ScalarTerms terms =
            build_terms(membership, lam, ctx, t, config.coord_quad_membership);
        const double w_new = prox_coordinate(loss, j, w_cur, terms, config.w_step_size);
        if (w_new != w_cur) {
          loss.apply(j, w_new - w_cur);
          weights(j, t) = w_new;
          for (Eigen::Index g = 0; g < n_groups; ++g) {
            const double kappa = ctx.kappa[static_cast<std::size_t>(g)];
            const double r_old = std::sqrt(kappa + membership(g, t) * w_cur * w_cur);
            const double r_new = std::sqrt(kappa + membership(g, t) * w_new * w_new);
            row_norm_sums[g] += r_new - r_old;
          }
          max_change = std::max(max_change, std::abs(w_new - w_cur));
        }
      }
    }
    report.max_change = max_change;
    if (max_change < config.tol) break;
  }

  const double objective_after = total_objective(problem, weights, membership, config).total;
  report.objective_delta = objective_after - objective_before;
  return report;
}

}  // namespace sgmtl
