#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Core vocabulary shared by every module: task data, solver configuration,
// fit results, and the error taxonomy. Conventions used throughout:
//   - weights W are d x m (column t = model of task t, row j = feature j),
//   - membership U is N x m (column t = soft group weights of task t,
//     each column lives on the probability simplex).
namespace sgmtl {

// ---- errors ---------------------------------------------------------------

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : Error { using Error::Error; };
struct BadLabels : Error { using Error::Error; };
struct EmptyProblem : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct MixedLossKinds : Error { using Error::Error; };
struct DegenerateClustering : Error { using Error::Error; };
struct TooFewExamples : Error { using Error::Error; };
struct InfeasibleSpec : Error { using Error::Error; };
struct NoPositives : Error { using Error::Error; };
struct DegenerateTargets : Error { using Error::Error; };
struct PreconditionViolated : Error { using Error::Error; };
struct UnknownMethod : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// ---- data -----------------------------------------------------------------

enum class LossKind { squared, logistic };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

struct TaskDataset {
  Eigen::MatrixXd features;  // n_t x d
  Eigen::VectorXd targets;   // n_t   (labels in {-1,+1} for logistic)
  LossKind loss = LossKind::squared;
  std::string task_id;

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index d() const { return features.cols(); }
};

struct Problem {
  std::vector<TaskDataset> tasks;

  Eigen::Index m() const { return static_cast<Eigen::Index>(tasks.size()); }
  Eigen::Index d() const { return tasks.empty() ? 0 : tasks.front().d(); }
};

// Throws EmptyProblem / DimensionMismatch / BadLabels / NonFinite if the
// problem is not well formed (no tasks, a task with zero rows, inconsistent
// feature counts, logistic targets outside {-1,+1}, or non-finite entries).
void validate_problem(const Problem& problem);

using WeightMatrix = Eigen::MatrixXd;  // d x m
using Membership = Eigen::MatrixXd;    // N x m, columns on the simplex

// ---- solver configuration ---------------------------------------------------

struct SolverConfig {
  int n_groups = 1;
  // Group-norm penalty weights: size 1 broadcasts one value to every group,
  // size n_groups gives per-group values.
  std::vector<double> lambda = {0.1};
  double mu = 0.0;  // fusion penalty weight (0 disables fusion)

  double u_step_size = 1.0;  // initial step for the projected-gradient U step
  double w_step_size = 1.0;  // initial step for each coordinate update
  double epsilon_denom = 1e-10;

  int max_outer = 100;
  int max_u_iters = 50;
  int max_w_passes = 10;
  double tol = 1e-5;
  int u_restarts = 5;
  std::uint64_t seed = 0;

  // Gradient of the quadratic penalty piece in the coordinate step. The
  // default weights it by the membership u_{g,t}, consistent with the
  // expansion of the squared group norm; the alternate form drops that
  // weight and is kept only for comparison runs.
  bool coord_quad_membership = true;

  double lambda_for(int g) const;
  // Throws DimensionMismatch / BadLabels on inconsistent or out-of-range
  // settings (lambda size not in {1, n_groups}, negative weights, ...).
  void validate() const;
};

// ---- results ----------------------------------------------------------------

struct FitResult {
  WeightMatrix weights;              // d x m
  Membership membership;             // N x m
  std::vector<int> hard_groups;      // per task: argmax_g u_{g,t}
  std::vector<double> objective_trace;  // recorded after every half-step
  bool converged = false;
  int iterations = 0;  // outer iterations executed
};

// Argmax over each membership column; ties resolve to the lowest group
// index. Throws DimensionMismatch on an empty membership.
std::vector<int> hard_assignment(const Membership& membership);

}  // namespace sgmtl
