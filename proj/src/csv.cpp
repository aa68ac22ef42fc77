#include "lqgame/csv.hpp"

#include <fstream>
#include <stdexcept>

namespace lqgame {

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.precision(17);
  return out;
}

}  // namespace

void export_riccati_csv(const RiccatiSolution& P, const std::string& path) {
  auto out = open_csv(path);
  const Eigen::Index n = P.values.empty() ? 0 : P.values.front().rows();
  out << "s";
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) out << ",P_" << (i + 1) << (j + 1);
  out << "\n";
  for (std::size_t k = 0; k < P.grid.size(); ++k) {
    out << P.grid[k];
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j) out << "," << P.values[k](i, j);
    out << "\n";
  }
}

void export_eta_csv(const AdjointSolution& adj, const std::string& path) {
  auto out = open_csv(path);
  out << "s";
  for (Eigen::Index i = 0; i < adj.dim(); ++i) out << ",eta_" << (i + 1);
  out << "\n";
  for (std::size_t k = 0; k < adj.grid().size(); ++k) {
    out << adj.grid()[k];
    for (Eigen::Index i = 0; i < adj.dim(); ++i) out << "," << adj.eta()[k](i);
    out << "\n";
  }
}

void export_strategy_csv(const ClosedLoopStrategy& st, const std::string& path) {
  auto out = open_csv(path);
  const Eigen::Index m = st.theta.empty() ? 0 : st.theta.front().rows();
  const Eigen::Index n = st.theta.empty() ? 0 : st.theta.front().cols();
  out << "s";
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out << ",Theta_" << (i + 1) << (j + 1);
  for (Eigen::Index i = 0; i < m; ++i) out << ",v_" << (i + 1);
  out << "\n";
  for (std::size_t k = 0; k < st.grid.size(); ++k) {
    out << st.grid[k];
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) out << "," << st.theta[k](i, j);
    for (Eigen::Index i = 0; i < m; ++i) out << "," << st.v[k](i);
    out << "\n";
  }
}

void export_paths_csv(const std::vector<long>& indices,
                      const std::vector<Eigen::VectorXd>& terminal_states,
                      const std::vector<double>& payoffs, const std::string& path) {
  if (indices.size() != terminal_states.size() || indices.size() != payoffs.size()) {
    throw std::invalid_argument("export_paths_csv: size mismatch");
  }
  auto out = open_csv(path);
  const Eigen::Index n = terminal_states.empty() ? 0 : terminal_states.front().size();
  out << "path";
  for (Eigen::Index i = 0; i < n; ++i) out << ",X_T_" << (i + 1);
  out << ",payoff\n";
  for (std::size_t p = 0; p < indices.size(); ++p) {
    out << indices[p];
    for (Eigen::Index i = 0; i < n; ++i) out << "," << terminal_states[p](i);
    out << "," << payoffs[p] << "\n";
  }
}

}  // namespace lqgame
