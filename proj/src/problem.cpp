#include "lqgame/problem.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lqgame/matrix_core.hpp"

namespace lqgame {

namespace {

constexpr int kValidationSamples = 129;
constexpr double kSymmetryTol = 1e-9;
constexpr double kBoundednessCap = 1e12;  // desk-scale proxy for L^inf membership

struct NamedFn {
  const char* name;
  const MatrixFunction* fn;
  Eigen::Index rows;
  Eigen::Index cols;
};

}  // namespace

GameProblem GameProblem::zero(Horizon h, Dims d) {
  GameProblem p;
  p.horizon = h;
  p.dims = d;
  const auto n = d.n, m1 = d.m1, m2 = d.m2;
  p.A = MatrixFunction::zero(n, n);
  p.B1 = MatrixFunction::zero(n, m1);
  p.B2 = MatrixFunction::zero(n, m2);
  p.C = MatrixFunction::zero(n, n);
  p.D1 = MatrixFunction::zero(n, m1);
  p.D2 = MatrixFunction::zero(n, m2);
  p.b = MatrixFunction::zero(n, 1);
  p.sigma = MatrixFunction::zero(n, 1);
  p.Q = MatrixFunction::zero(n, n);
  p.S1 = MatrixFunction::zero(m1, n);
  p.S2 = MatrixFunction::zero(m2, n);
  p.R11 = MatrixFunction::zero(m1, m1);
  p.R12 = MatrixFunction::zero(m1, m2);
  p.R21 = MatrixFunction::zero(m2, m1);
  p.R22 = MatrixFunction::zero(m2, m2);
  p.q = MatrixFunction::zero(n, 1);
  p.rho1 = MatrixFunction::zero(m1, 1);
  p.rho2 = MatrixFunction::zero(m2, 1);
  p.G = Eigen::MatrixXd::Zero(n, n);
  p.g = Eigen::VectorXd::Zero(n);
  return p;
}

ValidationReport validate(const GameProblem& p) {
  ValidationReport rep;
  auto fail = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

  if (!(p.horizon.t0 < p.horizon.T)) {
    fail("horizon: t0 must be < T");
    return rep;  // nothing else is meaningful
  }
  if (p.dims.n <= 0 || p.dims.m1 <= 0 || p.dims.m2 < 0) {
    fail("dims: need n >= 1, m1 >= 1, m2 >= 0");
    return rep;
  }

  const auto n = p.dims.n, m1 = p.dims.m1, m2 = p.dims.m2;
  const NamedFn fns[] = {
      {"A", &p.A, n, n},       {"B1", &p.B1, n, m1},   {"B2", &p.B2, n, m2},
      {"C", &p.C, n, n},       {"D1", &p.D1, n, m1},   {"D2", &p.D2, n, m2},
      {"b", &p.b, n, 1},       {"sigma", &p.sigma, n, 1},
      {"Q", &p.Q, n, n},       {"S1", &p.S1, m1, n},   {"S2", &p.S2, m2, n},
      {"R11", &p.R11, m1, m1}, {"R12", &p.R12, m1, m2},
      {"R21", &p.R21, m2, m1}, {"R22", &p.R22, m2, m2},
      {"q", &p.q, n, 1},       {"rho1", &p.rho1, m1, 1}, {"rho2", &p.rho2, m2, 1},
  };

  bool shapes_ok = true;
  for (const auto& f : fns) {
    if (f.fn->rows() != f.rows || f.fn->cols() != f.cols) {
      std::ostringstream os;
      os << f.name << ": shape " << f.fn->rows() << "x" << f.fn->cols()
         << ", expected " << f.rows << "x" << f.cols;
      fail(os.str());
      shapes_ok = false;
    }
    if (!f.fn->denominators_root_free(p.horizon.t0, p.horizon.T)) {
      fail(std::string(f.name) + ": rational denominator has a root inside the horizon");
    }
    if (!f.fn->spans(p.horizon.t0, p.horizon.T)) {
      fail(std::string(f.name) + ": sampled grid does not span the horizon");
    }
  }
  if (p.G.rows() != n || p.G.cols() != n) fail("G: wrong shape");
  if (p.g.size() != n) fail("g: wrong size");
  if (!shapes_ok) return rep;

  if (max_abs(p.G - p.G.transpose()) > kSymmetryTol) fail("G: not symmetric");
  if (!p.G.allFinite()) fail("G: non-finite entries");
  if (!p.g.allFinite()) fail("g: non-finite entries");

  for (int i = 0; i < kValidationSamples; ++i) {
    const double s =
        p.horizon.t0 + p.horizon.span() * static_cast<double>(i) / (kValidationSamples - 1);
    bool finite = true;
    for (const auto& f : fns) {
      const Eigen::MatrixXd v = (*f.fn)(s);
      if (!v.allFinite()) {
        std::ostringstream os;
        os << f.name << ": non-finite sample at s=" << s;
        fail(os.str());
        finite = false;
      }
    }
    if (!finite) break;

    const Eigen::MatrixXd Qs = p.Q(s);
    if (max_abs(Qs - Qs.transpose()) > kSymmetryTol) {
      std::ostringstream os;
      os << "Q: not symmetric at s=" << s;
      fail(os.str());
      break;
    }
    const Eigen::MatrixXd R11s = p.R11(s), R22s = p.R22(s);
    if (max_abs(R11s - R11s.transpose()) > kSymmetryTol) {
      std::ostringstream os;
      os << "R11: not symmetric at s=" << s;
      fail(os.str());
      break;
    }
    if (m2 > 0 && max_abs(R22s - R22s.transpose()) > kSymmetryTol) {
      std::ostringstream os;
      os << "R22: not symmetric at s=" << s;
      fail(os.str());
      break;
    }
    if (m2 > 0 && max_abs(p.R12(s).transpose() - p.R21(s)) > kSymmetryTol) {
      std::ostringstream os;
      os << "R12/R21: R12(s)^T != R21(s) at s=" << s;
      fail(os.str());
      break;
    }
    // boundedness proxy for the L^inf hypotheses on D and R
    const double dr_max =
        std::max({max_abs(p.D1(s)), max_abs(p.D2(s)), max_abs(R11s),
                  max_abs(p.R12(s)), max_abs(R22s)});
    if (dr_max > kBoundednessCap) {
      std::ostringstream os;
      os << "D/R: sample exceeds boundedness cap at s=" << s;
      fail(os.str());
      break;
    }
  }
  return rep;
}

StackedProblem::StackedProblem(GameProblem p) : p_(std::move(p)) {}

Eigen::MatrixXd StackedProblem::B(double s) const {
  Eigen::MatrixXd out(n(), m());
  out.leftCols(m1()) = p_.B1(s);
  if (m2() > 0) out.rightCols(m2()) = p_.B2(s);
  return out;
}

Eigen::MatrixXd StackedProblem::D(double s) const {
  Eigen::MatrixXd out(n(), m());
  out.leftCols(m1()) = p_.D1(s);
  if (m2() > 0) out.rightCols(m2()) = p_.D2(s);
  return out;
}

Eigen::MatrixXd StackedProblem::S(double s) const {
  Eigen::MatrixXd out(m(), n());
  out.topRows(m1()) = p_.S1(s);
  if (m2() > 0) out.bottomRows(m2()) = p_.S2(s);
  return out;
}

Eigen::MatrixXd StackedProblem::R(double s) const {
  Eigen::MatrixXd out(m(), m());
  out.topLeftCorner(m1(), m1()) = p_.R11(s);
  if (m2() > 0) {
    out.topRightCorner(m1(), m2()) = p_.R12(s);
    out.bottomLeftCorner(m2(), m1()) = p_.R21(s);
    out.bottomRightCorner(m2(), m2()) = p_.R22(s);
  }
  return out;
}

Eigen::VectorXd StackedProblem::rho(double s) const {
  Eigen::VectorXd out(m());
  out.head(m1()) = p_.rho1(s);
  if (m2() > 0) out.tail(m2()) = p_.rho2(s);
  return out;
}

bool StackedProblem::homogeneous_sampled() const {
  if (max_abs(p_.g) > 0.0) return false;
  for (int i = 0; i <= 32; ++i) {
    const double s = t0() + (T() - t0()) * i / 32.0;
    if (max_abs(b(s)) > 0.0 || max_abs(sigma(s)) > 0.0 || max_abs(q(s)) > 0.0 ||
        max_abs(rho(s)) > 0.0) {
      return false;
    }
  }
  return true;
}

StackedProblem assemble(GameProblem p) {
  const ValidationReport rep = validate(p);
  if (!rep.ok()) {
    std::ostringstream os;
    os << "assemble: invalid problem:";
    for (const auto& v : rep.violations) os << "\n  - " << v;
    throw std::invalid_argument(os.str());
  }
  return StackedProblem(std::move(p));
}

}  // namespace lqgame
