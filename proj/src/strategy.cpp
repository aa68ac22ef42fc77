#include "lqgame/strategy.hpp"

#include <cmath>
#include <stdexcept>

#include "lqgame/errors.hpp"
#include "lqgame/matrix_core.hpp"
#include "lqgame/simulate.hpp"

namespace lqgame {

Eigen::MatrixXd ClosedLoopStrategy::theta_at(double s) const {
  return interpolate_on_grid(grid, theta, s);
}

Eigen::VectorXd ClosedLoopStrategy::v_at(double s) const {
  std::vector<Eigen::MatrixXd> vm(v.begin(), v.end());
  return interpolate_on_grid(grid, vm, s);
}

ClosedLoopStrategy build_saddle(const StackedProblem& sp, const RiccatiSolution& P,
                                const AdjointSolution& adj, const RegularityReport& report) {
  if (!report.regular) {
    throw RegularityError("build_saddle: Riccati solution is not regular; failed: " +
                          report.failed_conditions());
  }
  if (!P.covers(sp.t0())) {
    throw std::invalid_argument("build_saddle: solution does not cover the horizon");
  }

  ClosedLoopStrategy out;
  out.grid = P.grid;
  out.m1 = sp.m1();
  out.m2 = sp.m2();
  out.theta.reserve(P.grid.size());
  out.v.reserve(P.grid.size());
  for (std::size_t k = 0; k < P.grid.size(); ++k) {
    const double s = P.grid[k];
    const Eigen::MatrixXd& Ps = P.values[k];
    const Eigen::MatrixXd B = sp.B(s), C = sp.C(s), D = sp.D(s);
    const Eigen::MatrixXd Rhat = sp.R(s) + D.transpose() * Ps * D;
    const Eigen::MatrixXd pin = pseudo_inverse(Rhat).pinv;
    const Eigen::MatrixXd L = B.transpose() * Ps + D.transpose() * Ps * C + sp.S(s);
    const Eigen::VectorXd w = B.transpose() * adj.eta_at(s) +
                              D.transpose() * adj.zeta_at(s) +
                              D.transpose() * Ps * sp.sigma(s) + sp.rho(s);
    out.theta.push_back(-(pin * L));
    out.v.push_back(-(pin * w));
  }
  return out;
}

ClosedLoopStrategy build_slq_optimal(const StackedProblem& sp, const RiccatiSolution& P,
                                     const AdjointSolution& adj,
                                     const RegularityReport& report) {
  if (sp.m2() != 0) {
    throw std::invalid_argument("build_slq_optimal: problem has a second player (m2 != 0)");
  }
  // With m2 = 0 the stacked blocks equal the player-1 blocks and the
  // player-2 sign condition is vacuous, so the saddle construction *is*
  // the optimal-strategy construction.
  return build_saddle(sp, P, adj, report);
}

AdjointPath adjoint_along_path(const StackedProblem& sp, const RiccatiSolution& P,
                               const AdjointSolution& adj, const StatePath& path,
                               const ClosedLoopStrategy& strategy) {
  if (path.grid != strategy.grid || path.grid != P.grid || path.grid != adj.grid()) {
    throw std::invalid_argument("adjoint_along_path: grid mismatch");
  }

  AdjointPath out;
  out.grid = path.grid;
  out.Y.reserve(path.grid.size());
  out.Z.reserve(path.grid.size());
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const double s = path.grid[k];
    const Eigen::MatrixXd& Ps = P.values[k];
    const Eigen::VectorXd X = path.X_at(k);
    const Eigen::MatrixXd C = sp.C(s), D = sp.D(s);
    out.Y.push_back(Ps * X + adj.eta()[k]);
    out.Z.push_back(Ps * (C + D * strategy.theta[k]) * X + Ps * D * strategy.v[k] +
                    Ps * sp.sigma(s));
  }
  return out;
}

}  // namespace lqgame
