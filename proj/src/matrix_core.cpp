#include "lqgame/matrix_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <limits>
#include <stdexcept>

namespace lqgame {

PinvResult pseudo_inverse(const Eigen::MatrixXd& m, double rel_tol) {
  if (!m.allFinite()) {
    throw std::invalid_argument("pseudo_inverse: matrix has non-finite entries");
  }
  if (rel_tol < 0.0) {
    throw std::invalid_argument("pseudo_inverse: rel_tol must be >= 0");
  }

  PinvResult out;
  if (m.size() == 0) {
    out.pinv = Eigen::MatrixXd::Zero(m.cols(), m.rows());
    out.singular_values = Eigen::VectorXd();
    return out;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.singular_values = svd.singularValues();
  const double sigma_max = out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  out.cutoff = (rel_tol > 0.0 ? rel_tol : static_cast<double>(std::max(m.rows(), m.cols())) * eps) * sigma_max;

  Eigen::Index r = 0;
  while (r < out.singular_values.size() && out.singular_values(r) > out.cutoff) ++r;
  out.rank = r;

  if (r == 0) {
    out.pinv = Eigen::MatrixXd::Zero(m.cols(), m.rows());
    return out;
  }
  out.pinv = svd.matrixV().leftCols(r) *
             out.singular_values.head(r).cwiseInverse().asDiagonal() *
             svd.matrixU().leftCols(r).transpose();

  // Newton refinement X <- 2X - XMX: the rank decision stays with the SVD,
  // this just shrinks the floating-point residual of the Penrose identities
  // (which otherwise grows with the kept condition number). Keep the better
  // iterate.
  auto identity1_residual = [&m](const Eigen::MatrixXd& x) {
    return max_abs(m * x * m - m);
  };
  double best = identity1_residual(out.pinv);
  for (int it = 0; it < 2 && best > 0.0; ++it) {
    Eigen::MatrixXd refined = 2.0 * out.pinv - out.pinv * m * out.pinv;
    const double res = identity1_residual(refined);
    if (res < best) {
      out.pinv = std::move(refined);
      best = res;
    } else {
      break;
    }
  }

  // preserve exact symmetry for symmetric input
  if (m.rows() == m.cols() && max_abs(m - m.transpose()) == 0.0) {
    out.pinv = symmetrized(out.pinv);
  }
  return out;
}

bool range_inclusion(const Eigen::MatrixXd& n, const Eigen::MatrixXd& m, double tol) {
  if (n.rows() != m.rows()) {
    throw std::invalid_argument("range_inclusion: row counts differ");
  }
  if (tol <= 0.0) {
    throw std::invalid_argument("range_inclusion: tol must be positive");
  }
  if (n.size() == 0) return true;

  const PinvResult p = pseudo_inverse(m);
  const Eigen::MatrixXd residual =
      n - m * (p.pinv * n);  // (I - M M†) N without forming I
  return max_abs(residual) <= tol * std::max(1.0, max_abs(n));
}

bool definiteness(const Eigen::MatrixXd& m, Definiteness mode, double tol) {
  if (tol <= 0.0) {
    throw std::invalid_argument("definiteness: tol must be positive");
  }
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("definiteness: matrix not square");
  }
  if (m.size() == 0) return true;  // vacuous (m2 = 0 blocks)
  if (!m.allFinite()) {
    throw std::invalid_argument("definiteness: matrix has non-finite entries");
  }
  if (max_abs(m - m.transpose()) > 1e6 * tol) {
    throw std::invalid_argument("definiteness: matrix asymmetry beyond 1e6*tol");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m),
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (mode == Definiteness::kPositiveSemi) return ev.minCoeff() >= -tol;
  return ev.maxCoeff() <= tol;
}

}  // namespace lqgame
