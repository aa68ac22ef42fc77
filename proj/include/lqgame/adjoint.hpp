#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "lqgame/problem.hpp"
#include "lqgame/riccati.hpp"

namespace lqgame {

/// Solution (eta, zeta) of the adjoint backward equation on the Riccati
/// grid. Under the deterministic-data restriction the martingale term is
/// identically zero; zeta is kept explicitly so downstream formulas read
/// term-for-term like the continuous ones.
class AdjointSolution {
 public:
  AdjointSolution() = default;
  AdjointSolution(std::vector<double> grid, std::vector<Eigen::VectorXd> eta);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<Eigen::VectorXd>& eta() const { return eta_; }

  Eigen::VectorXd eta_at(double s) const;
  Eigen::VectorXd zeta_at(double) const { return Eigen::VectorXd::Zero(dim_); }

  Eigen::Index dim() const { return dim_; }

 private:
  std::vector<double> grid_;
  std::vector<Eigen::VectorXd> eta_;
  Eigen::Index dim_ = 0;
};

/// Backward RK4 on the Riccati grid for
///   d(eta)/ds = -{ [A' - K B'] eta + [C' - K D'](zeta + P sigma)
///                  - K rho + P b + q },   eta(T) = g,
/// with K = (P B + C'P D + S')(R + D'P D)^† and zeta = 0.
/// Requires P to cover the full horizon.
AdjointSolution solve_eta(const StackedProblem& sp, const RiccatiSolution& P);

/// Nodewise range test of B'eta + D'zeta + D'P sigma + rho against
/// R + D'P D, and the refinement-ladder L^2 test of the pseudo-inverse
/// applied to it (same heuristic as the Theta audit).
std::pair<bool, bool> check_eta_conditions(const StackedProblem& sp, const RiccatiSolution& P,
                                           const AdjointSolution& adj,
                                           const RegularityOptions& opts = {});

/// Value function via the representation
///   V(t,x) = 1/2 { <P(t)x, x> + 2<eta(t), x>
///                  + ∫_t^T [<P sigma, sigma> + 2<eta, b> + 2<zeta, sigma>
///                           - <(R+D'PD)^† w, w>] ds },
/// w = B'eta + D'zeta + D'P sigma + rho, composite trapezoid on the grid.
double value_at(const StackedProblem& sp, const RiccatiSolution& P, const AdjointSolution& adj,
                double t, const Eigen::VectorXd& x);

}  // namespace lqgame
