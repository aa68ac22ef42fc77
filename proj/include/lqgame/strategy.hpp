#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lqgame/adjoint.hpp"
#include "lqgame/problem.hpp"
#include "lqgame/riccati.hpp"

namespace lqgame {

struct StatePath;  // simulate.hpp

/// Closed-loop feedback pair (Theta(.), v(.)) on a time grid, with the
/// player split Theta = (Theta1; Theta2), v = (v1; v2).
struct ClosedLoopStrategy {
  std::vector<double> grid;
  std::vector<Eigen::MatrixXd> theta;  // m x n per node
  std::vector<Eigen::VectorXd> v;      // m per node
  int m1 = 0;
  int m2 = 0;

  Eigen::MatrixXd theta1(std::size_t k) const { return theta[k].topRows(m1); }
  Eigen::MatrixXd theta2(std::size_t k) const { return theta[k].bottomRows(m2); }
  Eigen::VectorXd v1(std::size_t k) const { return v[k].head(m1); }
  Eigen::VectorXd v2(std::size_t k) const { return v[k].tail(m2); }

  Eigen::MatrixXd theta_at(double s) const;
  Eigen::VectorXd v_at(double s) const;
};

/// Adjoint pair reconstructed along one simulated path:
///   Y(s) = P(s) X(s) + eta(s),
///   Z(s) = P (C + D Theta) X + P D v + P sigma.
struct AdjointPath {
  std::vector<double> grid;
  std::vector<Eigen::VectorXd> Y;
  std::vector<Eigen::VectorXd> Z;
};

/// Closed-loop saddle from the regular Riccati solution:
///   Theta = -(R + D'PD)^† (B'P + D'PC + S),
///   v     = -(R + D'PD)^† (B'eta + D'zeta + D'P sigma + rho),
/// with the free parameters of the representation fixed to zero.
/// Refuses (RegularityError naming the failed condition) unless the
/// report says regular.
ClosedLoopStrategy build_saddle(const StackedProblem& sp, const RiccatiSolution& P,
                                const AdjointSolution& adj, const RegularityReport& report);

/// One-player (m2 = 0) specialization: same formulas restricted to player 1;
/// the player-2 sign condition is vacuous and R + D'PD must be psd.
ClosedLoopStrategy build_slq_optimal(const StackedProblem& sp, const RiccatiSolution& P,
                                     const AdjointSolution& adj, const RegularityReport& report);

/// Reconstruct (Y, Z) along a simulated path under the given strategy.
/// The construction is unconditional; the stationarity residual decides
/// whether the strategy was in fact stationary.
AdjointPath adjoint_along_path(const StackedProblem& sp, const RiccatiSolution& P,
                               const AdjointSolution& adj, const StatePath& path,
                               const ClosedLoopStrategy& strategy);

}  // namespace lqgame
