#include "lqgame/matrix_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lqgame {

MatrixFunction MatrixFunction::zero(Eigen::Index rows, Eigen::Index cols) {
  return constant(Eigen::MatrixXd::Zero(rows, cols));
}

MatrixFunction MatrixFunction::constant(const Eigen::MatrixXd& value) {
  MatrixFunction f;
  f.rows_ = value.rows();
  f.cols_ = value.cols();
  Rational r;
  r.entries.reserve(static_cast<std::size_t>(value.size()));
  for (Eigen::Index i = 0; i < value.rows(); ++i)
    for (Eigen::Index j = 0; j < value.cols(); ++j)
      r.entries.emplace_back(value(i, j));
  f.rep_ = std::move(r);
  return f;
}

MatrixFunction MatrixFunction::rational(Eigen::Index rows, Eigen::Index cols,
                                        std::vector<ScalarExpr> entries) {
  if (static_cast<Eigen::Index>(entries.size()) != rows * cols) {
    throw std::invalid_argument("MatrixFunction::rational: entry count != rows*cols");
  }
  MatrixFunction f;
  f.rows_ = rows;
  f.cols_ = cols;
  f.rep_ = Rational{std::move(entries)};
  return f;
}

MatrixFunction MatrixFunction::sampled(std::vector<double> times,
                                       std::vector<Eigen::MatrixXd> values) {
  if (times.size() < 2) {
    throw std::invalid_argument("MatrixFunction::sampled: need >= 2 nodes");
  }
  if (times.size() != values.size()) {
    throw std::invalid_argument("MatrixFunction::sampled: times/values size mismatch");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::invalid_argument("MatrixFunction::sampled: times not strictly increasing");
    }
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i].rows() != values[0].rows() || values[i].cols() != values[0].cols()) {
      throw std::invalid_argument("MatrixFunction::sampled: inconsistent value shapes");
    }
  }
  MatrixFunction f;
  f.rows_ = values[0].rows();
  f.cols_ = values[0].cols();
  f.rep_ = Sampled{std::move(times), std::move(values)};
  return f;
}

bool MatrixFunction::is_rational() const {
  return std::holds_alternative<Rational>(rep_);
}

Eigen::MatrixXd MatrixFunction::operator()(double s) const {
  if (const auto* r = std::get_if<Rational>(&rep_)) {
    Eigen::MatrixXd out(rows_, cols_);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < rows_; ++i)
      for (Eigen::Index j = 0; j < cols_; ++j) out(i, j) = r->entries[k++](s);
    return out;
  }
  const auto& g = std::get<Sampled>(rep_);
  return interpolate_on_grid(g.times, g.values, s);
}

MatrixFunction MatrixFunction::derivative() const {
  const auto* r = std::get_if<Rational>(&rep_);
  if (!r) {
    throw std::invalid_argument("MatrixFunction::derivative: sampled representation");
  }
  std::vector<ScalarExpr> d;
  d.reserve(r->entries.size());
  for (const auto& e : r->entries) d.push_back(e.derivative());
  return rational(rows_, cols_, std::move(d));
}

bool MatrixFunction::denominators_root_free(double t0, double t1) const {
  if (const auto* r = std::get_if<Rational>(&rep_)) {
    for (const auto& e : r->entries) {
      if (!e.denominator_root_free(t0, t1)) return false;
    }
  }
  return true;
}

bool MatrixFunction::spans(double t0, double t1) const {
  const auto* g = std::get_if<Sampled>(&rep_);
  if (!g) return true;
  const double slack = 1e-12 * (1.0 + std::abs(t1 - t0));
  return std::abs(g->times.front() - t0) <= slack && std::abs(g->times.back() - t1) <= slack;
}

const ScalarExpr& MatrixFunction::entry(Eigen::Index r, Eigen::Index c) const {
  const auto* rat = std::get_if<Rational>(&rep_);
  if (!rat) throw std::invalid_argument("MatrixFunction::entry: sampled representation");
  return rat->entries[static_cast<std::size_t>(r * cols_ + c)];
}

Eigen::MatrixXd interpolate_on_grid(const std::vector<double>& times,
                                    const std::vector<Eigen::MatrixXd>& values,
                                    double s) {
  const double span = times.back() - times.front();
  const double slack = 1e-12 * (1.0 + std::abs(span));
  if (s < times.front() - slack || s > times.back() + slack) {
    throw std::invalid_argument("interpolate_on_grid: time outside grid range");
  }
  s = std::clamp(s, times.front(), times.back());
  const auto it = std::upper_bound(times.begin(), times.end(), s);
  if (it == times.end()) return values.back();
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  if (hi == 0) return values.front();
  const std::size_t lo = hi - 1;
  const double w = (s - times[lo]) / (times[hi] - times[lo]);
  if (w == 0.0) return values[lo];
  return (1.0 - w) * values[lo] + w * values[hi];
}

}  // namespace lqgame
