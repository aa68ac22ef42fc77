#pragma once

#include <vector>

namespace lqgame {

/// Rational function of time: numerator / denominator, each a polynomial
/// stored by ascending-degree coefficients. Constants have denominator 1.
class ScalarExpr {
 public:
  ScalarExpr() : num_{0.0}, den_{1.0} {}
  /*implicit*/ ScalarExpr(double c) : num_{c}, den_{1.0} {}

  static ScalarExpr polynomial(std::vector<double> coeffs);
  static ScalarExpr rational(std::vector<double> num, std::vector<double> den);

  double operator()(double s) const;

  /// Exact derivative (quotient rule); stays rational.
  ScalarExpr derivative() const;

  ScalarExpr operator+(const ScalarExpr& o) const;
  ScalarExpr operator-(const ScalarExpr& o) const;
  ScalarExpr operator*(const ScalarExpr& o) const;
  ScalarExpr operator/(const ScalarExpr& o) const;

  /// True iff the denominator has no root in [t0, t1], decided by dense
  /// sampling (>= 10^4 points) with sign-change refinement.
  bool denominator_root_free(double t0, double t1) const;

  bool is_constant() const { return num_.size() <= 1 && den_.size() <= 1; }

  const std::vector<double>& num() const { return num_; }
  const std::vector<double>& den() const { return den_; }

 private:
  ScalarExpr(std::vector<double> num, std::vector<double> den);

  std::vector<double> num_;
  std::vector<double> den_;
};

}  // namespace lqgame
