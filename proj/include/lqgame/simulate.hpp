#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lqgame/adjoint.hpp"
#include "lqgame/problem.hpp"
#include "lqgame/riccati.hpp"
#include "lqgame/strategy.hpp"

namespace lqgame {

/// Reproducible Brownian increments: per-path engines are seeded from
/// (master_seed, path index) by a counter-based mix, so the same
/// (master_seed, n_paths, grid) always yields the same increments and
/// paths can be generated independently in any order.
struct BrownianBatch {
  std::uint64_t master_seed = 0;
  long n_paths = 0;
  std::vector<double> grid;
  long path_offset = 0;  // global index of path 0 (for chunked batches)

  /// Increments for one path: Gaussian with variance = step size,
  /// size grid.size() - 1. The stream depends only on
  /// (master_seed, path + path_offset), so chunked batches reproduce the
  /// full batch exactly.
  std::vector<double> increments_for(long path) const;
  void fill_increments(long path, double* out) const;
};

/// One simulated state path with the realized control at every node.
/// Values are stored flat (node-major) to keep large batches cheap.
struct StatePath {
  std::vector<double> grid;
  int n = 0;
  int m = 0;
  std::vector<double> X;  // (nodes x n) state per node
  std::vector<double> u;  // (nodes x m) realized control per node
  long path_index = 0;

  Eigen::Map<const Eigen::VectorXd> X_at(std::size_t k) const {
    return {X.data() + k * static_cast<std::size_t>(n), n};
  }
  Eigen::Map<const Eigen::VectorXd> u_at(std::size_t k) const {
    return {u.data() + k * static_cast<std::size_t>(m), m};
  }
};

struct MCEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample sd / sqrt(n_paths)
  long n_paths = 0;
};

MCEstimate mc_estimate(const std::vector<double>& samples);

/// Deterministic open-loop control: s -> stacked m-vector.
using ControlFunction = std::function<Eigen::VectorXd(double)>;
/// Scalar-parameterized family of open-loop control pairs.
using ControlFamily = std::function<ControlFunction(double)>;

/// Euler-Maruyama under feedback u = Theta X + v:
///   X_{k+1} = X_k + [(A + B Theta) X_k + B v + b] h + [(C + D Theta) X_k + D v + sigma] dW_k.
/// Materializes every path; use the estimate operations for large batches.
std::vector<StatePath> simulate_closed_loop(const StackedProblem& sp,
                                            const ClosedLoopStrategy& strategy,
                                            const Eigen::VectorXd& x0,
                                            const BrownianBatch& batch, int threads = 1);

/// Euler-Maruyama with an exogenous deterministic control u(s).
std::vector<StatePath> simulate_open_loop(const StackedProblem& sp, const ControlFunction& u,
                                          const Eigen::VectorXd& x0, const BrownianBatch& batch,
                                          int threads = 1);

/// Per-path trapezoid quadrature of the running cost plus terminal cost,
/// halved; mean and stderr across paths.
MCEstimate estimate_J(const StackedProblem& sp, const std::vector<StatePath>& paths);

/// The per-path payoffs behind estimate_J (one value per path).
std::vector<double> per_path_payoffs(const StackedProblem& sp,
                                     const std::vector<StatePath>& paths);

/// Streaming variants (payoffs only, no path storage).
std::vector<double> closed_loop_payoffs(const StackedProblem& sp,
                                        const ClosedLoopStrategy& strategy,
                                        const Eigen::VectorXd& x0, const BrownianBatch& batch,
                                        int threads = 1);
std::vector<double> open_loop_payoffs(const StackedProblem& sp, const ControlFunction& u,
                                      const Eigen::VectorXd& x0, const BrownianBatch& batch,
                                      int threads = 1);

/// A v-perturbation of one player's strategy, for the saddle inequalities.
struct Perturbation {
  int player = 1;  // 1 or 2
  std::function<Eigen::VectorXd(double)> delta_v;  // m_i-vector of time
  std::string label;
};

struct SaddleGap {
  std::string label;
  int player = 1;
  double gap = 0.0;        // mean of per-path payoff differences (CRN)
  double stderr_ = 0.0;
  double predicted = 0.0;  // completion-of-squares prediction
  bool sign_ok = false;        // player 1: gap >= -3 se; player 2: gap <= +3 se
  bool matches_prediction = false;  // |gap - predicted| <= 3 se
};

struct SaddleTestReport {
  MCEstimate baseline;
  std::vector<SaddleGap> gaps;
  bool all_pass = false;
};

/// Common-random-number check of the closed-loop saddle inequalities
/// against the completion-of-squares identity. Refuses on non-regular
/// input (RegularityError).
SaddleTestReport saddle_test(const StackedProblem& sp, const RiccatiSolution& P,
                             const AdjointSolution& adj, const ClosedLoopStrategy& strategy,
                             const RegularityReport& report,
                             const std::vector<Perturbation>& perturbations,
                             const Eigen::VectorXd& x0, const BrownianBatch& batch,
                             int threads = 1);

/// Max over nodes of the path-mean norm of the open-loop stationarity
/// expression B'Y + D'Z + S X + R u + rho along the given paths.
double stationarity_residual(const StackedProblem& sp, const RiccatiSolution& P,
                             const AdjointSolution& adj, const ClosedLoopStrategy& strategy,
                             const std::vector<StatePath>& paths);

/// Per-node sums of the stationarity-expression norms (for chunked
/// aggregation across path batches).
std::vector<double> stationarity_node_norms(const StackedProblem& sp, const RiccatiSolution& P,
                                            const AdjointSolution& adj,
                                            const ClosedLoopStrategy& strategy,
                                            const std::vector<StatePath>& paths);

struct ConvexityProbeResult {
  std::string label;
  double estimate = 0.0;  // (+-) E{...}/2 in J's normalization
  double stderr_ = 0.0;
  bool violated = false;  // estimate < -3 stderr
};

/// Probe the convexity (player 1) / concavity (player 2) condition with
/// sample controls, using the homogeneous variational dynamics X_i(t0) = 0.
std::vector<ConvexityProbeResult> convexity_probe(
    const StackedProblem& sp, int player,
    const std::vector<std::pair<std::string, std::function<Eigen::VectorXd(double)>>>& controls,
    const BrownianBatch& batch, int threads = 1);

struct DivergenceFit {
  double a = 0.0, b = 0.0, c = 0.0;  // J(lambda) ~ a lambda^2 + b lambda + c
  double a_stderr = 0.0;
  bool diverges = false;  // a > 3 * a_stderr
  std::vector<double> lambdas;
  std::vector<MCEstimate> j_estimates;
};

/// Least-squares quadratic fit of J(lambda) over a control family with
/// common random numbers; a positive leading coefficient beyond 3 stderr
/// reports open-loop upper value +infinity along the family.
DivergenceFit divergence_probe(const StackedProblem& sp, const ControlFamily& family,
                               const std::vector<double>& lambdas, const Eigen::VectorXd& x0,
                               const BrownianBatch& batch, int threads = 1);

}  // namespace lqgame
