#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "lqgame/scalar_expr.hpp"

namespace lqgame {

/// Time-dependent matrix coefficient: either a grid of rational-function
/// entries, or samples on a time grid with linear interpolation.
class MatrixFunction {
 public:
  MatrixFunction() = default;

  static MatrixFunction zero(Eigen::Index rows, Eigen::Index cols);
  static MatrixFunction constant(const Eigen::MatrixXd& value);
  /// entries is row-major, size rows*cols.
  static MatrixFunction rational(Eigen::Index rows, Eigen::Index cols,
                                 std::vector<ScalarExpr> entries);
  /// times strictly increasing with >= 2 nodes; one matrix per node.
  static MatrixFunction sampled(std::vector<double> times,
                                std::vector<Eigen::MatrixXd> values);

  Eigen::MatrixXd operator()(double s) const;

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }

  bool is_rational() const;
  bool is_sampled() const { return !is_rational(); }

  /// Exact entrywise derivative; rational representation only.
  MatrixFunction derivative() const;

  /// All rational denominators root-free on [t0, t1]; true for sampled.
  bool denominators_root_free(double t0, double t1) const;

  /// Sampled representation must span exactly [t0, t1] (within fp slack).
  bool spans(double t0, double t1) const;

  const ScalarExpr& entry(Eigen::Index r, Eigen::Index c) const;

 private:
  struct Rational {
    std::vector<ScalarExpr> entries;  // row-major
  };
  struct Sampled {
    std::vector<double> times;
    std::vector<Eigen::MatrixXd> values;
  };

  Eigen::Index rows_ = 0, cols_ = 0;
  std::variant<Rational, Sampled> rep_ = Rational{};
};

/// Linear interpolation helper shared by sampled coefficients and
/// grid-backed solution objects. Throws std::invalid_argument outside
/// [times.front(), times.back()] (with a relative fp slack).
Eigen::MatrixXd interpolate_on_grid(const std::vector<double>& times,
                                    const std::vector<Eigen::MatrixXd>& values,
                                    double s);

}  // namespace lqgame
