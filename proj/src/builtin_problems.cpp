#include <stdexcept>

#include "lqgame/problem.hpp"

namespace lqgame {

namespace {

// One-player problem on [0,1]: dX = u ds + u dW, cost
// (1/2)E X(1)^2 + (1/2)E ∫ (s^3/2 - s^2) u^2 ds. The Riccati solution is
// P(s) = s^2; the feedback gain -2/s is not square integrable, so no
// closed-loop optimal control exists.
GameProblem make_example_61() {
  GameProblem p = GameProblem::zero({0.0, 1.0}, {1, 1, 0});
  p.name = "example-6.1";
  p.B1 = MatrixFunction::constant(Eigen::MatrixXd::Ones(1, 1));
  p.D1 = MatrixFunction::constant(Eigen::MatrixXd::Ones(1, 1));
  p.R11 = MatrixFunction::rational(1, 1, {ScalarExpr::polynomial({0.0, 0.0, -1.0, 0.5})});
  p.G = Eigen::MatrixXd::Ones(1, 1);
  return p;
}

// One-player problem on [0,1] with R(s) = (s - 3/2)^2 + 3/4 = s^2 - 3s + 3,
// A = (1 - 2R)/(2R^2), B = (R - 1)/R, Q = -1/R, D = 1, G = -1. Its Riccati
// equation has the two solutions P1 = -1 (regular) and P2 = s - 2.
GameProblem make_example_62() {
  GameProblem p = GameProblem::zero({0.0, 1.0}, {1, 1, 0});
  p.name = "example-6.2";
  const std::vector<double> R{3.0, -3.0, 1.0};  // s^2 - 3s + 3
  p.A = MatrixFunction::rational(
      1, 1, {ScalarExpr::rational({-5.0, 6.0, -2.0}, {18.0, -36.0, 30.0, -12.0, 2.0})});
  p.B1 = MatrixFunction::rational(1, 1, {ScalarExpr::rational({2.0, -3.0, 1.0}, R)});
  p.D1 = MatrixFunction::constant(Eigen::MatrixXd::Ones(1, 1));
  p.Q = MatrixFunction::rational(1, 1, {ScalarExpr::rational({-1.0}, R)});
  p.R11 = MatrixFunction::rational(1, 1, {ScalarExpr::polynomial(R)});
  p.G = -Eigen::MatrixXd::Ones(1, 1);
  return p;
}

// Two-player game on [0,1]: dX = (u1 - u2)(ds + dW), payoff
// (1/2)E[X(1)^2 + ∫ (u1^2 - u2^2)]. P ≡ 1 and (-1,-1) is the unique
// closed-loop saddle point; no open-loop saddle point exists.
GameProblem make_example_63() {
  GameProblem p = GameProblem::zero({0.0, 1.0}, {1, 1, 1});
  p.name = "example-6.3";
  p.B1 = MatrixFunction::constant(Eigen::MatrixXd::Ones(1, 1));
  p.B2 = MatrixFunction::constant(-Eigen::MatrixXd::Ones(1, 1));
  p.D1 = MatrixFunction::constant(Eigen::MatrixXd::Ones(1, 1));
  p.D2 = MatrixFunction::constant(-Eigen::MatrixXd::Ones(1, 1));
  p.R11 = MatrixFunction::constant(Eigen::MatrixXd::Ones(1, 1));
  p.R22 = MatrixFunction::constant(-Eigen::MatrixXd::Ones(1, 1));
  p.G = Eigen::MatrixXd::Ones(1, 1);
  return p;
}

}  // namespace

bool is_builtin_problem(const std::string& name) {
  return name == "example-6.1" || name == "example-6.2" || name == "example-6.3";
}

GameProblem builtin_problem(const std::string& name) {
  if (name == "example-6.1") return make_example_61();
  if (name == "example-6.2") return make_example_62();
  if (name == "example-6.3") return make_example_63();
  throw std::invalid_argument("builtin_problem: unknown name '" + name + "'");
}

}  // namespace lqgame
