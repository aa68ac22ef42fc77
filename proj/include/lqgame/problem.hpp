#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lqgame/matrix_function.hpp"

namespace lqgame {

struct Horizon {
  double t0 = 0.0;
  double T = 1.0;
  double span() const { return T - t0; }
};

struct Dims {
  int n = 1;
  int m1 = 1;
  int m2 = 0;  // 0 means a one-player (SLQ) problem
  int m() const { return m1 + m2; }
};

/// Full coefficient/weight description of a two-person zero-sum LQ game
/// on a horizon. All coefficients are deterministic functions of time;
/// vector-valued terms are n x 1 (resp. m_i x 1) matrix functions.
struct GameProblem {
  std::string name;  // optional identifier (builtin name or file path)
  Horizon horizon;
  Dims dims;

  // state equation: dX = [A X + B1 u1 + B2 u2 + b] ds + [C X + D1 u1 + D2 u2 + sigma] dW
  MatrixFunction A, B1, B2, C, D1, D2;
  MatrixFunction b, sigma;

  // weights: terminal <G X(T), X(T)> + 2<g, X(T)>, running quadratic form in (X,u1,u2)
  MatrixFunction Q, S1, S2, R11, R12, R21, R22;
  MatrixFunction q, rho1, rho2;
  Eigen::MatrixXd G;
  Eigen::VectorXd g;

  /// A problem with every coefficient zero at the right shapes.
  static GameProblem zero(Horizon h, Dims d);
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Shape, symmetry, denominator-root, finiteness, and boundedness checks.
/// Violations are reported, never thrown.
ValidationReport validate(const GameProblem& p);

/// The problem in stacked (single-control) notation:
///   B = (B1 B2), D = (D1 D2), S = (S1; S2), R = [[R11,R12],[R21,R22]],
///   rho = (rho1; rho2), m = m1 + m2.
/// Evaluation concatenates the originating blocks, so stacked evaluation
/// equals blockwise evaluation exactly and splitting round-trips.
class StackedProblem {
 public:
  explicit StackedProblem(GameProblem p);

  const GameProblem& problem() const { return p_; }

  int n() const { return p_.dims.n; }
  int m1() const { return p_.dims.m1; }
  int m2() const { return p_.dims.m2; }
  int m() const { return p_.dims.m(); }
  double t0() const { return p_.horizon.t0; }
  double T() const { return p_.horizon.T; }
  const Horizon& horizon() const { return p_.horizon; }

  Eigen::MatrixXd A(double s) const { return p_.A(s); }
  Eigen::MatrixXd B(double s) const;
  Eigen::MatrixXd C(double s) const { return p_.C(s); }
  Eigen::MatrixXd D(double s) const;
  Eigen::MatrixXd Q(double s) const { return p_.Q(s); }
  Eigen::MatrixXd S(double s) const;
  Eigen::MatrixXd R(double s) const;
  Eigen::VectorXd b(double s) const { return p_.b(s); }
  Eigen::VectorXd sigma(double s) const { return p_.sigma(s); }
  Eigen::VectorXd q(double s) const { return p_.q(s); }
  Eigen::VectorXd rho(double s) const;
  const Eigen::MatrixXd& G() const { return p_.G; }
  const Eigen::VectorXd& g() const { return p_.g; }

  /// True iff every inhomogeneous term (b, sigma, q, rho, g) is zero at
  /// the sampled check points (the homogeneous game of the uniqueness
  /// argument).
  bool homogeneous_sampled() const;

 private:
  GameProblem p_;
};

/// Validates, then stacks. Throws std::invalid_argument listing the
/// violations if validation fails.
StackedProblem assemble(GameProblem p);

/// Recover the originating per-player blocks (identity by construction).
inline const GameProblem& split(const StackedProblem& sp) { return sp.problem(); }

/// Built-in named problems: "example-6.1", "example-6.2", "example-6.3".
GameProblem builtin_problem(const std::string& name);
bool is_builtin_problem(const std::string& name);

}  // namespace lqgame
