#include "lqgame/scalar_expr.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace lqgame {

namespace {

void trim(std::vector<double>& p) {
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
}

double horner(const std::vector<double>& p, double s) {
  double v = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * s + p[i];
  return v;
}

std::vector<double> poly_add(const std::vector<double>& a, const std::vector<double>& b,
                             double sign) {
  std::vector<double> out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += sign * b[i];
  trim(out);
  return out;
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  trim(out);
  return out;
}

std::vector<double> poly_diff(const std::vector<double>& p) {
  if (p.size() <= 1) return {0.0};
  std::vector<double> out(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) out[i - 1] = static_cast<double>(i) * p[i];
  trim(out);
  return out;
}

bool is_one(const std::vector<double>& p) { return p.size() == 1 && p[0] == 1.0; }

}  // namespace

ScalarExpr::ScalarExpr(std::vector<double> num, std::vector<double> den)
    : num_(std::move(num)), den_(std::move(den)) {
  trim(num_);
  trim(den_);
  if (den_.size() == 1 && den_[0] == 0.0) {
    throw std::invalid_argument("ScalarExpr: zero denominator");
  }
}

ScalarExpr ScalarExpr::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs = {0.0};
  return ScalarExpr(std::move(coeffs), {1.0});
}

ScalarExpr ScalarExpr::rational(std::vector<double> num, std::vector<double> den) {
  if (num.empty()) num = {0.0};
  if (den.empty()) throw std::invalid_argument("ScalarExpr: empty denominator");
  return ScalarExpr(std::move(num), std::move(den));
}

double ScalarExpr::operator()(double s) const {
  const double n = horner(num_, s);
  if (is_one(den_)) return n;
  return n / horner(den_, s);
}

ScalarExpr ScalarExpr::derivative() const {
  if (is_one(den_)) return ScalarExpr(poly_diff(num_), {1.0});
  // (n'd - nd') / d^2
  auto num = poly_add(poly_mul(poly_diff(num_), den_), poly_mul(num_, poly_diff(den_)), -1.0);
  return ScalarExpr(std::move(num), poly_mul(den_, den_));
}

ScalarExpr ScalarExpr::operator+(const ScalarExpr& o) const {
  return ScalarExpr(poly_add(poly_mul(num_, o.den_), poly_mul(o.num_, den_), 1.0),
                    poly_mul(den_, o.den_));
}

ScalarExpr ScalarExpr::operator-(const ScalarExpr& o) const {
  return ScalarExpr(poly_add(poly_mul(num_, o.den_), poly_mul(o.num_, den_), -1.0),
                    poly_mul(den_, o.den_));
}

ScalarExpr ScalarExpr::operator*(const ScalarExpr& o) const {
  return ScalarExpr(poly_mul(num_, o.num_), poly_mul(den_, o.den_));
}

ScalarExpr ScalarExpr::operator/(const ScalarExpr& o) const {
  return ScalarExpr(poly_mul(num_, o.den_), poly_mul(den_, o.num_));
}

bool ScalarExpr::denominator_root_free(double t0, double t1) const {
  if (is_one(den_)) return true;
  const int kSamples = 10001;
  const double h = (t1 - t0) / (kSamples - 1);
  double prev = horner(den_, t0);
  if (prev == 0.0) return false;
  for (int i = 1; i < kSamples; ++i) {
    const double s = (i == kSamples - 1) ? t1 : t0 + i * h;
    const double cur = horner(den_, s);
    if (cur == 0.0) return false;
    if ((prev < 0.0) != (cur < 0.0)) return false;  // sign change => root crossed
    prev = cur;
  }
  // refinement pass around local minima of |den| to catch grazing roots
  for (int i = 1; i < kSamples - 1; ++i) {
    const double s = t0 + i * h;
    const double v = std::abs(horner(den_, s));
    if (v < 1e-9 * (1.0 + std::abs(horner(den_, t0)))) {
      for (int j = 0; j <= 64; ++j) {
        const double sj = s - h + 2.0 * h * j / 64.0;
        if (sj < t0 || sj > t1) continue;
        if (horner(den_, sj) == 0.0) return false;
        if ((horner(den_, sj) < 0.0) != (prev < 0.0)) return false;
      }
    }
  }
  return true;
}

}  // namespace lqgame
