#pragma once

#include <string>
#include <vector>

#include "lqgame/adjoint.hpp"
#include "lqgame/riccati.hpp"
#include "lqgame/simulate.hpp"
#include "lqgame/strategy.hpp"

namespace lqgame {

/// Columns: s, P_11, P_12, ..., P_nn (row-major upper triangle).
void export_riccati_csv(const RiccatiSolution& P, const std::string& path);

/// Columns: s, eta_1 .. eta_n.
void export_eta_csv(const AdjointSolution& adj, const std::string& path);

/// Columns: s, Theta row-major, v.
void export_strategy_csv(const ClosedLoopStrategy& st, const std::string& path);

/// Columns: path, X_T components, payoff (per-path terminal state + payoff).
void export_paths_csv(const std::vector<long>& indices,
                      const std::vector<Eigen::VectorXd>& terminal_states,
                      const std::vector<double>& payoffs, const std::string& path);

}  // namespace lqgame
