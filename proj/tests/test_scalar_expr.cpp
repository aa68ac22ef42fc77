#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lqgame/matrix_core.hpp"
#include "lqgame/matrix_function.hpp"
#include "lqgame/scalar_expr.hpp"

using namespace lqgame;

TEST_CASE("polynomial evaluation and derivative") {
  const auto p = ScalarExpr::polynomial({0.0, 0.0, -1.0, 0.5});  // s^3/2 - s^2
  CHECK(p(0.0) == 0.0);
  CHECK(p(0.5) == doctest::Approx(-0.1875).epsilon(1e-15));
  CHECK(p(1.0) == doctest::Approx(-0.5).epsilon(1e-15));
  const auto d = p.derivative();  // 3s^2/2 - 2s
  CHECK(d(1.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(d(0.0) == 0.0);
}

TEST_CASE("rational arithmetic closes") {
  const auto R = ScalarExpr::polynomial({3.0, -3.0, 1.0});  // s^2 - 3s + 3
  const auto one = ScalarExpr(1.0);
  const auto B = (R - one) / R;
  const auto A = ((R - one) * (R - one) / (R * R) - one) * ScalarExpr(0.5);
  // hand-reduced forms
  const auto B_ref = ScalarExpr::rational({2.0, -3.0, 1.0}, {3.0, -3.0, 1.0});
  const auto A_ref =
      ScalarExpr::rational({-5.0, 6.0, -2.0}, {18.0, -36.0, 30.0, -12.0, 2.0});
  for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    CHECK(B(s) == doctest::Approx(B_ref(s)).epsilon(1e-14));
    CHECK(A(s) == doctest::Approx(A_ref(s)).epsilon(1e-14));
  }
}

TEST_CASE("quotient-rule derivative matches finite differences") {
  const auto f = ScalarExpr::rational({1.0, 2.0}, {3.0, -3.0, 1.0});
  const auto df = f.derivative();
  for (double s : {0.1, 0.4, 0.9}) {
    const double h = 1e-6;
    const double fd = (f(s + h) - f(s - h)) / (2.0 * h);
    CHECK(df(s) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("denominator root detection") {
  // den = s - 0.5 has a root inside [0, 1]
  const auto bad = ScalarExpr::rational({1.0}, {-0.5, 1.0});
  CHECK_FALSE(bad.denominator_root_free(0.0, 1.0));
  CHECK(bad.denominator_root_free(0.6, 1.0));

  // R(s) = s^2 - 3s + 3 > 0 everywhere on [0, 1]
  const auto good = ScalarExpr::rational({1.0}, {3.0, -3.0, 1.0});
  CHECK(good.denominator_root_free(0.0, 1.0));

  // sign-preserving double root (s-0.5)^2 still counts as a root
  const auto graze = ScalarExpr::rational({1.0}, {0.25, -1.0, 1.0});
  CHECK_FALSE(graze.denominator_root_free(0.0, 1.0));
}

TEST_CASE("MatrixFunction representations agree at sample points") {
  Eigen::MatrixXd v(2, 2);
  v << 1, 2, 3, 4;
  const auto c = MatrixFunction::constant(v);
  CHECK(max_abs(c(0.3) - v) == 0.0);

  const auto lin = MatrixFunction::sampled(
      {0.0, 1.0}, {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1)});
  CHECK(lin(0.25)(0, 0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(lin(1.5), std::invalid_argument);

  const auto r = MatrixFunction::rational(1, 1, {ScalarExpr::polynomial({0.0, 1.0})});
  CHECK(r(0.7)(0, 0) == doctest::Approx(0.7));
  CHECK(r.derivative()(0.7)(0, 0) == doctest::Approx(1.0));
}
