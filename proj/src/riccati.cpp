#include "lqgame/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lqgame/adjoint.hpp"
#include "lqgame/errors.hpp"
#include "lqgame/matrix_core.hpp"

namespace lqgame {

namespace {

std::vector<double> uniform_grid(double t0, double T, int steps) {
  std::vector<double> g(static_cast<std::size_t>(steps) + 1);
  const double h = (T - t0) / steps;
  for (int k = 0; k <= steps; ++k) g[static_cast<std::size_t>(k)] = t0 + k * h;
  g.back() = T;
  return g;
}

// Merge adjacent near-singular nodes into one representative per run (the
// sigma-argmin), so the ladder excludes each dip once.
std::vector<double> merge_singular_runs(const std::vector<double>& grid,
                                        const std::vector<double>& sigma,
                                        double dip) {
  std::vector<double> points;
  std::size_t i = 0;
  while (i < grid.size()) {
    if (sigma[i] >= dip) {
      ++i;
      continue;
    }
    std::size_t best = i;
    std::size_t j = i;
    while (j < grid.size() && sigma[j] < dip) {
      if (sigma[j] < sigma[best]) best = j;
      ++j;
    }
    points.push_back(grid[best]);
    i = j;
  }
  return points;
}

double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  if (!(b > a)) return 0.0;
  const double h = (b - a) / n;
  double sum = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) sum += f(a + i * h);
  return sum * h;
}

// Integral over [t0, T] minus the union of (p - eps, p + eps) balls.
double integral_outside(const std::function<double(double)>& f,
                        const std::vector<double>& points, double eps, double t0,
                        double T, int segments_per_unit) {
  std::vector<std::pair<double, double>> keep{{t0, T}};
  for (double p : points) {
    std::vector<std::pair<double, double>> next;
    for (auto [a, b] : keep) {
      const double lo = p - eps, hi = p + eps;
      if (hi <= a || lo >= b) {
        next.emplace_back(a, b);
        continue;
      }
      if (lo > a) next.emplace_back(a, lo);
      if (hi < b) next.emplace_back(hi, b);
    }
    keep = std::move(next);
  }
  double total = 0.0;
  for (auto [a, b] : keep) {
    const int n = std::max(16, static_cast<int>((b - a) * segments_per_unit));
    total += trapezoid(f, a, b, n);
  }
  return total;
}

}  // namespace

Eigen::MatrixXd RiccatiSolution::at(double s) const {
  return interpolate_on_grid(grid, values, s);
}

bool RiccatiSolution::covers(double t0) const {
  if (grid.empty()) return false;
  return grid.front() <= t0 + 1e-12 * (1.0 + std::abs(grid.back() - t0));
}

double RiccatiSolution::max_norm() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, max_abs(v));
  return m;
}

double RiccatiSolution::max_asymmetry() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, max_abs(v - v.transpose()));
  return m;
}

std::string RegularityReport::failed_conditions() const {
  std::vector<std::string> failed;
  if (!range_ok) failed.push_back("range inclusion (5.2)");
  if (!theta_l2.square_integrable) failed.push_back("Theta L^2 integrability");
  if (!sign_player1) failed.push_back("player-1 sign condition (psd)");
  if (!sign_player2) failed.push_back("player-2 sign condition (nsd)");
  if (!eta_range_ok) failed.push_back("adjoint range condition");
  if (!v_l2_ok) failed.push_back("v L^2 integrability");
  if (failed.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < failed.size(); ++i) {
    if (i) out += "; ";
    out += failed[i];
  }
  return out;
}

Eigen::MatrixXd riccati_rhs(double s, const Eigen::MatrixXd& P, const StackedProblem& sp) {
  const Eigen::MatrixXd A = sp.A(s), B = sp.B(s), C = sp.C(s), D = sp.D(s);
  const Eigen::MatrixXd Q = sp.Q(s), S = sp.S(s), R = sp.R(s);

  const Eigen::MatrixXd PD = P * D;
  const Eigen::MatrixXd Rhat = R + D.transpose() * PD;
  const Eigen::MatrixXd L = B.transpose() * P + D.transpose() * P * C + S;  // m x n
  const Eigen::MatrixXd pin = pseudo_inverse(Rhat).pinv;

  Eigen::MatrixXd rhs = -(P * A + A.transpose() * P + C.transpose() * P * C + Q -
                          L.transpose() * (pin * L));
  rhs = symmetrized(rhs);
  if (!rhs.allFinite()) {
    throw NumericOverflowError("riccati_rhs: non-finite value", s);
  }
  return rhs;
}

RiccatiSolution integrate_riccati(const StackedProblem& sp, int steps, double cap) {
  if (steps < 2) throw std::invalid_argument("integrate_riccati: steps must be >= 2");

  RiccatiSolution sol;
  sol.source = RiccatiSolution::Source::kIntegrated;
  const std::vector<double> grid = uniform_grid(sp.t0(), sp.T(), steps);
  const double h = (sp.T() - sp.t0()) / steps;

  std::vector<Eigen::MatrixXd> values(grid.size());
  values.back() = symmetrized(sp.G());

  std::size_t lowest = grid.size() - 1;
  for (std::size_t k = grid.size() - 1; k > 0; --k) {
    const double s = grid[k];
    const Eigen::MatrixXd& P = values[k];
    try {
      const Eigen::MatrixXd k1 = riccati_rhs(s, P, sp);
      const Eigen::MatrixXd k2 = riccati_rhs(s - 0.5 * h, P - 0.5 * h * k1, sp);
      const Eigen::MatrixXd k3 = riccati_rhs(s - 0.5 * h, P - 0.5 * h * k2, sp);
      const Eigen::MatrixXd k4 = riccati_rhs(s - h, P - h * k3, sp);
      Eigen::MatrixXd next = P - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      next = symmetrized(next);
      if (!next.allFinite() || max_abs(next) > cap) {
        sol.blowup = grid[k - 1];
        break;
      }
      values[k - 1] = std::move(next);
      lowest = k - 1;
    } catch (const NumericOverflowError& e) {
      sol.blowup = e.time();
      break;
    }
  }

  sol.grid.assign(grid.begin() + static_cast<std::ptrdiff_t>(lowest), grid.end());
  sol.values.assign(values.begin() + static_cast<std::ptrdiff_t>(lowest), values.end());
  return sol;
}

RiccatiSolution supplied_solution(const MatrixFunction& P, const StackedProblem& sp, int steps) {
  if (steps < 2) throw std::invalid_argument("supplied_solution: steps must be >= 2");
  if (P.rows() != sp.n() || P.cols() != sp.n()) {
    throw std::invalid_argument("supplied_solution: candidate has wrong shape");
  }
  RiccatiSolution sol;
  sol.source = RiccatiSolution::Source::kSupplied;
  sol.grid = uniform_grid(sp.t0(), sp.T(), steps);
  sol.values.reserve(sol.grid.size());
  for (double s : sol.grid) sol.values.push_back(symmetrized(P(s)));
  return sol;
}

namespace {

double residual_at(double s, const Eigen::MatrixXd& P, const Eigen::MatrixXd& Pdot,
                   const StackedProblem& sp) {
  return max_abs(Pdot - riccati_rhs(s, P, sp));
}

}  // namespace

double residual_verify(const RiccatiSolution& P, const StackedProblem& sp,
                       const std::vector<double>& grid) {
  if (grid.size() < 2) throw std::invalid_argument("residual_verify: grid too small");
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid[i];
    Eigen::MatrixXd Pdot;
    if (i == 0) {
      Pdot = (P.at(grid[1]) - P.at(grid[0])) / (grid[1] - grid[0]);
    } else if (i + 1 == grid.size()) {
      Pdot = (P.at(grid[i]) - P.at(grid[i - 1])) / (grid[i] - grid[i - 1]);
    } else {
      Pdot = (P.at(grid[i + 1]) - P.at(grid[i - 1])) / (grid[i + 1] - grid[i - 1]);
    }
    worst = std::max(worst, residual_at(s, P.at(s), Pdot, sp));
  }
  return worst;
}

double residual_verify(const MatrixFunction& P, const StackedProblem& sp,
                       const std::vector<double>& grid) {
  if (grid.size() < 2) throw std::invalid_argument("residual_verify: grid too small");
  double worst = 0.0;
  if (P.is_rational()) {
    const MatrixFunction Pdot = P.derivative();
    for (double s : grid) {
      worst = std::max(worst, residual_at(s, symmetrized(P(s)), Pdot(s), sp));
    }
    return worst;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid[i];
    Eigen::MatrixXd Pdot;
    if (i == 0) {
      Pdot = (P(grid[1]) - P(grid[0])) / (grid[1] - grid[0]);
    } else if (i + 1 == grid.size()) {
      Pdot = (P(grid[i]) - P(grid[i - 1])) / (grid[i] - grid[i - 1]);
    } else {
      Pdot = (P(grid[i + 1]) - P(grid[i - 1])) / (grid[i + 1] - grid[i - 1]);
    }
    worst = std::max(worst, residual_at(s, symmetrized(P(s)), Pdot, sp));
  }
  return worst;
}

L2Verdict ladder_l2_test(const std::function<double(double)>& squared_norm,
                         const std::vector<double>& singular_points, double t0, double T,
                         const RegularityOptions& opts) {
  L2Verdict v;
  const int segs = 4096;
  const int per_unit = static_cast<int>(segs / std::max(T - t0, 1e-12));
  if (singular_points.empty()) {
    v.integral = integral_outside(squared_norm, {}, 0.0, t0, T, per_unit);
    v.square_integrable = v.integral <= opts.integral_cap && std::isfinite(v.integral);
    if (!v.square_integrable) v.growth = std::numeric_limits<double>::infinity();
    return v;
  }

  const double eps0 = opts.eps0_fraction * (T - t0);
  double integral = integral_outside(squared_norm, singular_points, eps0, t0, T, per_unit);

  // Annulus increments between consecutive neighborhood radii; for an L^2
  // function they shrink, for a non-integrable singularity they grow.
  std::vector<double> increments;
  double eps_prev = eps0;
  for (int j = 1; j <= opts.levels; ++j) {
    const double eps_j = eps0 * std::pow(2.0, -j);
    double inc = 0.0;
    for (double p : singular_points) {
      const double l0 = std::max(t0, p - eps_prev), l1 = std::max(t0, p - eps_j);
      const double r0 = std::min(T, p + eps_j), r1 = std::min(T, p + eps_prev);
      if (l1 > l0) inc += trapezoid(squared_norm, l0, l1, 64);
      if (r1 > r0) inc += trapezoid(squared_norm, r0, r1, 64);
    }
    increments.push_back(inc);
    integral += inc;
    eps_prev = eps_j;
  }

  v.integral = integral;
  const double first = increments.front();
  const double last = increments.back();
  v.growth = first > 0.0 ? last / first : (last > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  const bool grows = static_cast<int>(increments.size()) >= opts.min_halvings && last > first;
  v.square_integrable = !(grows || integral > opts.integral_cap || !std::isfinite(integral));
  if (!v.square_integrable) {
    // report the dominant singular point
    double best = singular_points.front(), best_inc = -1.0;
    for (double p : singular_points) {
      const double eps_j = eps0 * std::pow(2.0, -opts.levels);
      const double probe = squared_norm(std::min(T, std::max(t0, p + 2.0 * eps_j)));
      if (probe > best_inc) {
        best_inc = probe;
        best = p;
      }
    }
    v.location = best;
  }
  return v;
}

RegularityReport check_regularity(const RiccatiSolution& P, const StackedProblem& sp,
                                  const AdjointSolution* adj, const RegularityOptions& opts) {
  RegularityReport rep;
  if (P.grid.size() < 2) throw std::invalid_argument("check_regularity: empty solution");

  const double t_lo = P.grid.front(), t_hi = P.grid.back();

  auto rhat_at = [&](double s) -> Eigen::MatrixXd {
    const Eigen::MatrixXd D = sp.D(s);
    return sp.R(s) + D.transpose() * P.at(s) * D;
  };
  auto gain_matrix_at = [&](double s) {
    const Eigen::MatrixXd Ps = P.at(s);
    const Eigen::MatrixXd L =
        sp.B(s).transpose() * Ps + sp.D(s).transpose() * Ps * sp.C(s) + sp.S(s);
    return Eigen::MatrixXd(-(pseudo_inverse(rhat_at(s)).pinv * L));
  };

  // (a) range inclusion and (c) sign conditions at every node, plus the
  // sigma profile used for near-singular detection.
  std::vector<double> sigma_min(P.grid.size(), 0.0);
  rep.range_ok_nodes.resize(P.grid.size());
  for (std::size_t k = 0; k < P.grid.size(); ++k) {
    const double s = P.grid[k];
    const Eigen::MatrixXd Ps = P.values[k];
    const Eigen::MatrixXd D = sp.D(s);
    const Eigen::MatrixXd Rhat = sp.R(s) + D.transpose() * Ps * D;
    const Eigen::MatrixXd L = sp.B(s).transpose() * Ps + D.transpose() * Ps * sp.C(s) + sp.S(s);

    const bool ok = range_inclusion(L, Rhat, opts.range_tol);
    rep.range_ok_nodes[k] = ok;
    rep.range_ok = rep.range_ok && ok;

    const PinvResult pr = pseudo_inverse(Rhat);
    sigma_min[k] = pr.rank > 0 ? pr.singular_values(pr.rank - 1) : 0.0;

    const Eigen::MatrixXd D1 = sp.problem().D1(s), D2 = sp.problem().D2(s);
    if (!definiteness(sp.problem().R11(s) + D1.transpose() * Ps * D1,
                      Definiteness::kPositiveSemi, opts.sign_tol)) {
      rep.sign_player1 = false;
    }
    if (sp.m2() > 0 &&
        !definiteness(sp.problem().R22(s) + D2.transpose() * Ps * D2,
                      Definiteness::kNegativeSemi, opts.sign_tol)) {
      rep.sign_player2 = false;
    }
  }

  // (b) Theta L^2 ladder around the sigma dips.
  const std::vector<double> dips = merge_singular_runs(P.grid, sigma_min, opts.sv_dip);
  auto theta_sq = [&](double s) { return gain_matrix_at(s).squaredNorm(); };
  rep.theta_l2 = ladder_l2_test(theta_sq, dips, t_lo, t_hi, opts);

  // (d) adjoint-dependent conditions.
  if (adj != nullptr) {
    rep.adjoint_checked = true;
    auto w_at = [&](double s) -> Eigen::VectorXd {
      const Eigen::MatrixXd Ps = P.at(s);
      const Eigen::MatrixXd D = sp.D(s);
      return sp.B(s).transpose() * adj->eta_at(s) + D.transpose() * adj->zeta_at(s) +
             D.transpose() * Ps * sp.sigma(s) + sp.rho(s);
    };
    for (std::size_t k = 0; k < P.grid.size(); ++k) {
      const double s = P.grid[k];
      if (!range_inclusion(w_at(s), rhat_at(s), opts.range_tol)) {
        rep.eta_range_ok = false;
        break;
      }
    }
    auto v_sq = [&](double s) {
      return (pseudo_inverse(rhat_at(s)).pinv * w_at(s)).squaredNorm();
    };
    rep.v_l2 = ladder_l2_test(v_sq, dips, t_lo, t_hi, opts);
    rep.v_l2_ok = rep.v_l2.square_integrable;
  } else {
    rep.notes.push_back(
        "adjoint data not supplied: eta-range and v-L2 verdicts are vacuous");
  }

  rep.regular = rep.range_ok && rep.theta_l2.square_integrable && rep.sign_player1 &&
                rep.sign_player2 && rep.eta_range_ok && rep.v_l2_ok;
  return rep;
}

double compare_regular_solutions(const RiccatiSolution& pa, const RegularityReport& ra,
                                 const RiccatiSolution& pb, const RegularityReport& rb) {
  if (!ra.regular || !rb.regular) {
    throw std::invalid_argument(
        "compare_regular_solutions: both solutions must be flagged regular");
  }
  std::vector<double> grid;
  grid.reserve(pa.grid.size() + pb.grid.size());
  grid.insert(grid.end(), pa.grid.begin(), pa.grid.end());
  grid.insert(grid.end(), pb.grid.begin(), pb.grid.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const double lo = std::max(pa.grid.front(), pb.grid.front());
  const double hi = std::min(pa.grid.back(), pb.grid.back());
  double worst = 0.0;
  for (double s : grid) {
    if (s < lo || s > hi) continue;
    worst = std::max(worst, max_abs(pa.at(s) - pb.at(s)));
  }
  return worst;
}

}  // namespace lqgame
