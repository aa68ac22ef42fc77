#include "lqgame/adjoint.hpp"

#include <cmath>
#include <stdexcept>

#include "lqgame/errors.hpp"
#include "lqgame/matrix_core.hpp"

namespace lqgame {

namespace {

std::vector<Eigen::MatrixXd> to_matrices(const std::vector<Eigen::VectorXd>& v) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(v.size());
  for (const auto& x : v) out.emplace_back(x);
  return out;
}

}  // namespace

AdjointSolution::AdjointSolution(std::vector<double> grid, std::vector<Eigen::VectorXd> eta)
    : grid_(std::move(grid)), eta_(std::move(eta)) {
  if (grid_.size() != eta_.size() || grid_.size() < 2) {
    throw std::invalid_argument("AdjointSolution: grid/eta size mismatch");
  }
  dim_ = eta_.front().size();
}

Eigen::VectorXd AdjointSolution::eta_at(double s) const {
  return interpolate_on_grid(grid_, to_matrices(eta_), s);
}

AdjointSolution solve_eta(const StackedProblem& sp, const RiccatiSolution& P) {
  if (!P.covers(sp.t0())) {
    throw std::invalid_argument("solve_eta: Riccati solution does not cover the horizon");
  }

  auto drift = [&](double s, const Eigen::VectorXd& eta) -> Eigen::VectorXd {
    const Eigen::MatrixXd Ps = P.at(s);
    const Eigen::MatrixXd B = sp.B(s), C = sp.C(s), D = sp.D(s), S = sp.S(s);
    const Eigen::MatrixXd Rhat = sp.R(s) + D.transpose() * Ps * D;
    const Eigen::MatrixXd K =
        (Ps * B + C.transpose() * Ps * D + S.transpose()) * pseudo_inverse(Rhat).pinv;
    const Eigen::VectorXd zeta = Eigen::VectorXd::Zero(sp.n());
    Eigen::VectorXd d =
        -((sp.A(s).transpose() - K * B.transpose()) * eta +
          (C.transpose() - K * D.transpose()) * (zeta + Ps * sp.sigma(s)) - K * sp.rho(s) +
          Ps * sp.b(s) + sp.q(s));
    if (!d.allFinite()) throw NumericOverflowError("solve_eta: non-finite drift", s);
    return d;
  };

  const auto& grid = P.grid;
  std::vector<Eigen::VectorXd> eta(grid.size());
  eta.back() = sp.g();
  for (std::size_t k = grid.size() - 1; k > 0; --k) {
    const double s = grid[k];
    const double h = grid[k] - grid[k - 1];
    const Eigen::VectorXd& e = eta[k];
    const Eigen::VectorXd k1 = drift(s, e);
    const Eigen::VectorXd k2 = drift(s - 0.5 * h, e - 0.5 * h * k1);
    const Eigen::VectorXd k3 = drift(s - 0.5 * h, e - 0.5 * h * k2);
    const Eigen::VectorXd k4 = drift(s - h, e - h * k3);
    eta[k - 1] = e - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!eta[k - 1].allFinite()) {
      throw NumericOverflowError("solve_eta: non-finite eta", grid[k - 1]);
    }
  }
  return AdjointSolution(grid, std::move(eta));
}

std::pair<bool, bool> check_eta_conditions(const StackedProblem& sp, const RiccatiSolution& P,
                                           const AdjointSolution& adj,
                                           const RegularityOptions& opts) {
  const RegularityReport rep = check_regularity(P, sp, &adj, opts);
  return {rep.eta_range_ok, rep.v_l2_ok};
}

double value_at(const StackedProblem& sp, const RiccatiSolution& P, const AdjointSolution& adj,
                double t, const Eigen::VectorXd& x) {
  const double slack = 1e-12 * (1.0 + std::abs(sp.T() - sp.t0()));
  if (t < sp.t0() - slack || t > sp.T() + slack) {
    throw std::invalid_argument("value_at: t outside the horizon");
  }
  if (x.size() != sp.n()) throw std::invalid_argument("value_at: state has wrong size");

  auto integrand = [&](double s) {
    const Eigen::MatrixXd Ps = P.at(s);
    const Eigen::VectorXd eta = adj.eta_at(s);
    const Eigen::VectorXd zeta = adj.zeta_at(s);
    const Eigen::VectorXd sig = sp.sigma(s);
    const Eigen::MatrixXd D = sp.D(s);
    const Eigen::VectorXd w =
        sp.B(s).transpose() * eta + D.transpose() * zeta + D.transpose() * Ps * sig + sp.rho(s);
    const Eigen::MatrixXd Rhat = sp.R(s) + D.transpose() * Ps * D;
    return (Ps * sig).dot(sig) + 2.0 * eta.dot(sp.b(s)) + 2.0 * zeta.dot(sig) -
           w.dot(pseudo_inverse(Rhat).pinv * w);
  };

  // trapezoid on the solution grid from t to T, with a partial first cell
  double integral = 0.0;
  const auto& grid = P.grid;
  std::size_t k0 = 0;
  while (k0 + 1 < grid.size() && grid[k0 + 1] <= t) ++k0;
  double prev_s = std::max(t, grid[k0]);
  double prev_f = integrand(prev_s);
  for (std::size_t k = k0 + 1; k < grid.size(); ++k) {
    const double s = grid[k];
    if (s <= prev_s) continue;
    const double f = integrand(s);
    integral += 0.5 * (prev_f + f) * (s - prev_s);
    prev_s = s;
    prev_f = f;
  }

  const Eigen::MatrixXd Pt = P.at(t);
  return 0.5 * ((Pt * x).dot(x) + 2.0 * adj.eta_at(t).dot(x) + integral);
}

}  // namespace lqgame
