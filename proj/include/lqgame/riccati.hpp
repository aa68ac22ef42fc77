#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lqgame/problem.hpp"

namespace lqgame {

/// Symmetric matrix trajectory P(.) on a time grid, from backward
/// integration or a supplied closed form sampled onto a grid.
struct RiccatiSolution {
  enum class Source { kIntegrated, kSupplied };

  std::vector<double> grid;             // strictly increasing, last = T
  std::vector<Eigen::MatrixXd> values;  // P(s_k), symmetric
  Source source = Source::kIntegrated;
  std::optional<double> blowup;         // divergence time, if integration aborted

  /// Linear interpolation between nodes; error outside [grid.front(), T].
  Eigen::MatrixXd at(double s) const;

  /// True iff the grid reaches down to t0 (false after a blow-up truncation).
  bool covers(double t0) const;

  double max_norm() const;
  double max_asymmetry() const;
};

/// Options for the regularity audit. Thresholds per the audit design:
/// near-singular detection at sv_dip, refinement ladder eps_j = 2^-j * eps0
/// for j = 0..levels, divergence declared when the last annulus increment
/// exceeds the first after >= min_halvings, or the integral passes
/// integral_cap.
struct RegularityOptions {
  double range_tol = 1e-9;
  double sign_tol = 1e-8;
  double sv_dip = 1e-6;
  double eps0_fraction = 1.0 / 16.0;  // eps0 = fraction * (T - t0)
  int levels = 12;
  int min_halvings = 8;
  double integral_cap = 1e8;
};

/// Verdict of the refinement-ladder L^2 test.
struct L2Verdict {
  bool square_integrable = true;
  double location = 0.0;        // near-singular point when divergent
  double growth = 0.0;          // last/first annulus increment ratio
  double integral = 0.0;        // integral outside the innermost neighborhoods
};

/// Verdicts for the range, L^2, and sign conditions of the regular-solution
/// audit; `regular` is the conjunction.
struct RegularityReport {
  std::vector<bool> range_ok_nodes;
  bool range_ok = true;
  L2Verdict theta_l2;
  bool sign_player1 = true;  // R11 + D1' P D1 psd at every node
  bool sign_player2 = true;  // R22 + D2' P D2 nsd at every node
  bool eta_range_ok = true;
  L2Verdict v_l2;
  bool v_l2_ok = true;
  bool adjoint_checked = false;  // false => eta/v verdicts are vacuous
  bool regular = true;
  std::vector<std::string> notes;

  std::string failed_conditions() const;
};

/// Right-hand side dP/ds of the game Riccati equation
///   dP/ds = -[P A + A'P + C'P C + Q
///             - (P B + C'P D + S')(R + D'P D)^† (B'P + D'P C + S)],
/// output symmetrized. Throws NumericOverflowError on non-finite values.
Eigen::MatrixXd riccati_rhs(double s, const Eigen::MatrixXd& P, const StackedProblem& sp);

/// Classical fixed-step RK4, backward from P(T) = G on a uniform grid with
/// `steps` intervals. On blow-up (max norm above `cap` or an overflow in the
/// rhs) the returned solution is truncated at the last good node and carries
/// the blow-up time.
RiccatiSolution integrate_riccati(const StackedProblem& sp, int steps, double cap = 1e12);

/// Sample a closed-form candidate onto a uniform grid (source = kSupplied).
RiccatiSolution supplied_solution(const MatrixFunction& P, const StackedProblem& sp, int steps);

/// Max over grid nodes of the Riccati equation residual
/// || dP/ds - rhs(s, P(s)) ||_max. The derivative is exact for rational
/// candidates and central/one-sided finite differences for grid data.
double residual_verify(const RiccatiSolution& P, const StackedProblem& sp,
                       const std::vector<double>& grid);
double residual_verify(const MatrixFunction& P, const StackedProblem& sp,
                       const std::vector<double>& grid);

/// Audit the range-inclusion, Theta L^2, and sign conditions; with adjoint
/// data also the range/L^2 conditions on the v-term (skipped with a note
/// otherwise). Report-style: never throws on a failed condition.
class AdjointSolution;  // adjoint.hpp
RegularityReport check_regularity(const RiccatiSolution& P, const StackedProblem& sp,
                                  const AdjointSolution* adj = nullptr,
                                  const RegularityOptions& opts = {});

/// Uniqueness harness (regular solutions agree): max-node deviation over the
/// union grid. Throws std::invalid_argument unless both reports say regular.
double compare_regular_solutions(const RiccatiSolution& pa, const RegularityReport& ra,
                                 const RiccatiSolution& pb, const RegularityReport& rb);

/// Refinement-ladder L^2 test of s -> |f(s)|^2 against near-singular points;
/// shared by the Theta and v audits.
L2Verdict ladder_l2_test(const std::function<double(double)>& squared_norm,
                         const std::vector<double>& singular_points, double t0, double T,
                         const RegularityOptions& opts);

}  // namespace lqgame
