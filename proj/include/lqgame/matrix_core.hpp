#pragma once

#include <Eigen/Dense>

namespace lqgame {

/// Result of an SVD-based Moore-Penrose pseudo-inverse.
///
/// The four Penrose identities hold to ~10x the rank cutoff:
///   M M† M = M,  M† M M† = M†,  (M M†)ᵀ = M M†,  (M† M)ᵀ = M† M.
struct PinvResult {
  Eigen::MatrixXd pinv;              // n x m for an m x n input
  Eigen::Index rank = 0;             // singular values above the cutoff
  Eigen::VectorXd singular_values;   // nonincreasing
  double cutoff = 0.0;               // the rank cutoff actually used
};

/// SVD pseudo-inverse. Singular values <= cutoff are treated as zero, where
/// cutoff = max(rows, cols) * eps * sigma_max when rel_tol == 0 (the default
/// rank decision), else rel_tol * sigma_max.
/// Throws std::invalid_argument on non-finite entries.
PinvResult pseudo_inverse(const Eigen::MatrixXd& m, double rel_tol = 0.0);

inline constexpr double kDefaultRangeTol = 1e-9;
inline constexpr double kDefaultSignTol = 1e-8;

/// Algebraic test for range(N) ⊆ range(M):
///   true  iff  ||(I - M M†) N||_max <= tol * max(1, ||N||_max).
/// Throws std::invalid_argument if row counts differ.
bool range_inclusion(const Eigen::MatrixXd& n, const Eigen::MatrixXd& m,
                     double tol = kDefaultRangeTol);

enum class Definiteness { kPositiveSemi, kNegativeSemi };

/// Sign-definiteness of a (nearly) symmetric matrix, tested on the
/// symmetrized (M + Mᵀ)/2: psd iff lambda_min >= -tol, nsd iff
/// lambda_max <= tol. Asymmetry beyond 1e6 * tol is an invalid-input error.
bool definiteness(const Eigen::MatrixXd& m, Definiteness mode,
                  double tol = kDefaultSignTol);

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

inline double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace lqgame
