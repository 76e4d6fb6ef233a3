#include "sgmtl/baselines.hpp"

#include "sgmtl/objective.hpp"
#include "sgmtl/rng.hpp"
#include "sgmtl/w_step.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sgmtl {

namespace {

// Gradient of the smooth loss part only (no l2 term), kept by each solver
// via residuals (squared) or margins (logistic).
struct SmoothState {
  const TaskDataset* data = nullptr;
  Eigen::VectorXd state;  // residual X w - y, or margins y .* (X w)

  static SmoothState make(const TaskDataset& task, const Eigen::VectorXd& w) {
    SmoothState s;
    s.data = &task;
    s.state = task.loss == LossKind::squared ? (task.features * w - task.targets).eval()
                                             : task.targets.cwiseProduct(task.features * w).eval();
    return s;
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

  Eigen::VectorXd gradient() const {
    const double n = static_cast<double>(data->n());
    if (data->loss == LossKind::squared) return data->features.transpose() * state / n;
    Eigen::VectorXd coeff(state.size());
    for (Eigen::Index i = 0; i < state.size(); ++i) {
      const double z = state[i];
      const double sig = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
      coeff[i] = -data->targets[i] * sig;
    }
    return data->features.transpose() * coeff / n;
  }

  void apply(Eigen::Index j, double delta) {
    if (delta == 0.0) return;
    if (data->loss == LossKind::squared)
      state += delta * data->features.col(j);
    else
      state += delta * data->targets.cwiseProduct(data->features.col(j));
  }
};

}  // namespace

double elastic_net_kkt_residual(const TaskDataset& data, const Eigen::VectorXd& w,
                                const ElasticNetConfig& config) {
  const SmoothState state = SmoothState::make(data, w);
  const Eigen::VectorXd grad = state.gradient();
  double residual = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const double g = grad[j] + config.l2 * w[j];
    double r;
    if (w[j] > 0.0)
      r = std::abs(g + config.l1);
    else if (w[j] < 0.0)
      r = std::abs(g - config.l1);
    else
      r = std::max(0.0, std::abs(g) - config.l1);
    residual = std::max(residual, r);
  }
  return residual;
}

Eigen::VectorXd fit_elastic_net(const TaskDataset& data, const ElasticNetConfig& config) {
  if (data.n() == 0) throw EmptyProblem("elastic net on empty dataset");
  if (config.l1 < 0.0 || config.l2 < 0.0) throw BadLabels("elastic net penalties must be >= 0");

  const Eigen::Index d = data.d();
  const double n = static_cast<double>(data.n());

  // Per-coordinate curvature: exact for squared loss, the 1/4 bound for
  // logistic (majorization step, descent still guaranteed).
  Eigen::VectorXd curvature(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double sq = data.features.col(j).squaredNorm() / n;
    curvature[j] = data.loss == LossKind::squared ? sq : 0.25 * sq;
  }

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  SmoothState state = SmoothState::make(data, w);

  double residual = std::numeric_limits<double>::infinity();
  for (int pass = 0; pass < config.max_iters; ++pass) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double denom = curvature[j] + config.l2;
      if (denom <= 0.0) {
        // Zero column with no ridge: the penalty alone decides, w_j = 0.
        if (w[j] != 0.0) {
          state.apply(j, -w[j]);
          w[j] = 0.0;
        }
        continue;
      }
      const double g = state.partial(j);
      const double target = curvature[j] * w[j] - g;
      const double updated = soft_threshold(target, config.l1) / denom;
      if (updated != w[j]) {
        state.apply(j, updated - w[j]);
        w[j] = updated;
      }
    }
    residual = elastic_net_kkt_residual(data, w, config);
    if (residual <= config.tol) return w;
  }
  if (residual > 10.0 * config.tol)
    throw NoConvergence("elastic net KKT residual " + std::to_string(residual) + " after " +
                        std::to_string(config.max_iters) + " passes");
  return w;
}

WeightMatrix fit_stl(const Problem& problem, const ElasticNetConfig& config) {
  validate_problem(problem);
  WeightMatrix weights(problem.d(), problem.m());
  const Eigen::Index m = problem.m();
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index t = 0; t < m; ++t)
    weights.col(t) = fit_elastic_net(problem.tasks[static_cast<std::size_t>(t)], config);
  return weights;
}

Eigen::VectorXd fit_all_tasks(const Problem& problem, const ElasticNetConfig& config) {
  validate_problem(problem);
  const LossKind kind = problem.tasks.front().loss;
  Eigen::Index total_rows = 0;
  for (const auto& task : problem.tasks) {
    if (task.loss != kind)
      throw MixedLossKinds("cannot pool tasks with different loss kinds");
    total_rows += task.n();
  }
  TaskDataset pooled;
  pooled.loss = kind;
  pooled.task_id = "pooled";
  pooled.features.resize(total_rows, problem.d());
  pooled.targets.resize(total_rows);
  Eigen::Index row = 0;
  for (const auto& task : problem.tasks) {
    pooled.features.middleRows(row, task.n()) = task.features;
    pooled.targets.segment(row, task.n()) = task.targets;
    row += task.n();
  }
  return fit_elastic_net(pooled, config);
}

Eigen::MatrixXd fit_multitask_lasso(const Problem& problem, double lambda_12,
                                    const std::vector<int>& task_subset, int max_iters,
                                    double tol) {
  validate_problem(problem);
  if (lambda_12 < 0.0) throw BadLabels("lambda_12 must be >= 0");

  std::vector<int> subset = task_subset;
  if (subset.empty()) {
    subset.resize(static_cast<std::size_t>(problem.m()));
    std::iota(subset.begin(), subset.end(), 0);
  }
  for (int t : subset)
    if (t < 0 || t >= problem.m())
      throw DimensionMismatch("task subset index out of range in fit_multitask_lasso");

  const Eigen::Index d = problem.d();
  const Eigen::Index k = static_cast<Eigen::Index>(subset.size());

  auto smooth = [&](const Eigen::MatrixXd& w) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < k; ++c)
      total += task_loss(problem.tasks[static_cast<std::size_t>(subset[c])], w.col(c));
    return total;
  };
  auto smooth_grad = [&](const Eigen::MatrixXd& w) {
    Eigen::MatrixXd grad(d, k);
    for (Eigen::Index c = 0; c < k; ++c)
      grad.col(c) =
          task_loss_gradient(problem.tasks[static_cast<std::size_t>(subset[c])], w.col(c));
    return grad;
  };
  auto row_norm_sum = [&](const Eigen::MatrixXd& w) {
    return w.rowwise().norm().sum();
  };
  auto prox_rows = [&](Eigen::MatrixXd w, double amount) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double norm = w.row(j).norm();
      w.row(j) *= norm > amount ? 1.0 - amount / norm : 0.0;
    }
    return w;
  };

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, k);
  double f = smooth(w);
  double objective = f + lambda_12 * row_norm_sum(w);
  double step = 1.0;
  double rel_change = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iters; ++iter) {
    const Eigen::MatrixXd grad = smooth_grad(w);
    Eigen::MatrixXd candidate;
    double f_cand = 0.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      candidate = prox_rows(w - step * grad, step * lambda_12);
      const Eigen::MatrixXd delta = candidate - w;
      f_cand = smooth(candidate);
      // Majorization test: guarantees the full objective cannot increase.
      const double bound =
          f + grad.cwiseProduct(delta).sum() + delta.squaredNorm() / (2.0 * step);
      if (f_cand <= bound + 1e-12) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      rel_change = 0.0;  // no step passes the majorization test: stationary
      break;
    }

    const double new_objective = f_cand + lambda_12 * row_norm_sum(candidate);
    rel_change = (objective - new_objective) / std::max(1.0, std::abs(objective));
    w = std::move(candidate);
    f = f_cand;
    objective = new_objective;
    step = std::min(step * 1.25, 1e6);  // cautious growth for the next iterate
    if (rel_change >= 0.0 && rel_change < tol) {
      rel_change = 0.0;
      break;
    }
  }
  if (rel_change > 10.0 * tol)
    throw NoConvergence("multitask lasso still moving after " + std::to_string(max_iters) +
                        " iterations");

  // Final thresholding: no partial-row numerical dust.
  for (Eigen::Index j = 0; j < d; ++j)
    if (w.row(j).norm() <= 1e-12) w.row(j).setZero();
  return w;
}

std::vector<int> kmeans_columns(const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
  const Eigen::Index m = points.cols();
  if (k < 1 || k > m) throw DegenerateClustering("k must be in [1, #points]");

  std::vector<int> labels(static_cast<std::size_t>(m), 0);
  for (int attempt = 0; attempt <= 10; ++attempt) {
    Rng rng(mix_seed(seed, 0x6b6d6561ull /* "kmea" */, static_cast<std::uint64_t>(attempt)));

    // k-means++ style seeding.
    Eigen::MatrixXd centers(points.rows(), k);
    centers.col(0) = points.col(static_cast<Eigen::Index>(rng.uniform_index(m)));
    Eigen::VectorXd dist2 =
        (points.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
    for (int c = 1; c < k; ++c) {
      const double total = dist2.sum();
      Eigen::Index chosen = 0;
      if (total > 0.0) {
        const double draw = rng.uniform() * total;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
          acc += dist2[i];
          if (acc >= draw) {
            chosen = i;
            break;
          }
        }
      } else {
        chosen = static_cast<Eigen::Index>(rng.uniform_index(m));
      }
      centers.col(c) = points.col(chosen);
      dist2 = dist2.cwiseMin((points.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
    }

    // Lloyd iterations.
    std::vector<int> assign(static_cast<std::size_t>(m), -1);
    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      for (Eigen::Index i = 0; i < m; ++i) {
        int best = 0;
        double best_d = (points.col(i) - centers.col(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
          const double dcur = (points.col(i) - centers.col(c)).squaredNorm();
          if (dcur < best_d) {
            best_d = dcur;
            best = c;
          }
        }
        if (assign[static_cast<std::size_t>(i)] != best) {
          assign[static_cast<std::size_t>(i)] = best;
          changed = true;
        }
      }
      if (!changed) break;
      for (int c = 0; c < k; ++c) {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(points.rows());
        int count = 0;
        for (Eigen::Index i = 0; i < m; ++i)
          if (assign[static_cast<std::size_t>(i)] == c) {
            mean += points.col(i);
            ++count;
          }
        if (count > 0) centers.col(c) = mean / count;
      }
    }

    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int a : assign) ++counts[static_cast<std::size_t>(a)];
    labels = assign;
    const bool has_empty = std::any_of(counts.begin(), counts.end(), [](int c) { return c == 0; });
    if (!has_empty) return labels;
    // Empty cluster: retry with a fresh seeding, or accept after 10 tries.
  }
  return labels;
}

FitResult fit_clus_mtl(const Problem& problem, int n_clusters, const ElasticNetConfig& stl_config,
                       double lambda_12, std::uint64_t seed) {
  validate_problem(problem);
  if (n_clusters < 1 || n_clusters > problem.m())
    throw DegenerateClustering("n_clusters must be in [1, m]");

  const WeightMatrix stl = fit_stl(problem, stl_config);
  const std::vector<int> labels = kmeans_columns(stl, n_clusters, seed);

  std::vector<std::vector<int>> clusters(static_cast<std::size_t>(n_clusters));
  for (Eigen::Index t = 0; t < problem.m(); ++t)
    clusters[static_cast<std::size_t>(labels[static_cast<std::size_t>(t)])].push_back(
        static_cast<int>(t));

  FitResult result;
  result.weights = WeightMatrix::Zero(problem.d(), problem.m());
  const int k = n_clusters;
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < k; ++c) {
    const auto& members = clusters[static_cast<std::size_t>(c)];
    if (members.empty()) continue;
    const Eigen::MatrixXd block = fit_multitask_lasso(problem, lambda_12, members);
    for (std::size_t idx = 0; idx < members.size(); ++idx)
      result.weights.col(members[idx]) = block.col(static_cast<Eigen::Index>(idx));
  }

  result.membership = Membership::Zero(n_clusters, problem.m());
  for (Eigen::Index t = 0; t < problem.m(); ++t)
    result.membership(labels[static_cast<std::size_t>(t)], t) = 1.0;
  result.hard_groups = labels;
  result.converged = true;
  result.iterations = 0;
  return result;
}

}  // namespace sgmtl
