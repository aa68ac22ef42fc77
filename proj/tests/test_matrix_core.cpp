#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lqgame/matrix_core.hpp"

using namespace lqgame;
using Eigen::MatrixXd;

namespace {

double penrose_violation(const MatrixXd& m, const PinvResult& p) {
  double worst = 0.0;
  worst = std::max(worst, max_abs(m * p.pinv * m - m));
  worst = std::max(worst, max_abs(p.pinv * m * p.pinv - p.pinv));
  const MatrixXd mp = m * p.pinv;
  const MatrixXd pm = p.pinv * m;
  worst = std::max(worst, max_abs(mp - mp.transpose()));
  worst = std::max(worst, max_abs(pm - pm.transpose()));
  return worst;
}

MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> dist(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

}  // namespace

TEST_CASE("pseudo_inverse on fixed matrices") {
  SUBCASE("zero 2x2 -> zero, rank 0") {
    const auto r = pseudo_inverse(MatrixXd::Zero(2, 2));
    CHECK(r.rank == 0);
    CHECK(max_abs(r.pinv) == 0.0);
  }
  SUBCASE("identity 3x3 -> identity, rank 3") {
    const auto r = pseudo_inverse(MatrixXd::Identity(3, 3));
    CHECK(r.rank == 3);
    CHECK(max_abs(r.pinv - MatrixXd::Identity(3, 3)) < 1e-14);
  }
  SUBCASE("diag(2, 0) -> diag(0.5, 0), rank 1") {
    MatrixXd m = MatrixXd::Zero(2, 2);
    m(0, 0) = 2.0;
    const auto r = pseudo_inverse(m);
    CHECK(r.rank == 1);
    CHECK(r.pinv(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(r.pinv(1, 1)) < 1e-15);
    CHECK(std::abs(r.pinv(0, 1)) < 1e-15);
  }
  SUBCASE("non-finite input throws") {
    MatrixXd m = MatrixXd::Zero(2, 2);
    m(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(pseudo_inverse(m), std::invalid_argument);
  }
  SUBCASE("singular values nonincreasing and rank matches cutoff count") {
    std::mt19937_64 rng(7);
    const MatrixXd m = random_matrix(rng, 5, 3);
    const auto r = pseudo_inverse(m);
    for (int i = 1; i < r.singular_values.size(); ++i) {
      CHECK(r.singular_values(i) <= r.singular_values(i - 1));
    }
    Eigen::Index above = 0;
    for (int i = 0; i < r.singular_values.size(); ++i) {
      if (r.singular_values(i) > r.cutoff) ++above;
    }
    CHECK(r.rank == above);
  }
}

TEST_CASE("Penrose identity suite on 1000 random matrices (sizes <= 8)") {
  std::mt19937_64 rng(20240809);
  std::uniform_int_distribution<int> size(1, 8);
  std::uniform_int_distribution<int> kind(0, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    const int rows = size(rng), cols = size(rng);
    MatrixXd m = random_matrix(rng, rows, cols);
    switch (kind(rng)) {
      case 1:  // rank deficient
        if (cols > 1) m.col(cols - 1) = m.col(0);
        break;
      case 2:  // badly scaled
        m *= 1e6;
        break;
      case 3:  // symmetric
        if (rows == cols) m = symmetrized(m);
        break;
      default:
        break;
    }
    const auto r = pseudo_inverse(m);
    const double scale = r.singular_values.size() ? r.singular_values(0) : 1.0;
    CHECK(penrose_violation(m, r) <= 10.0 * std::max(r.cutoff, 1e-15 * scale));
  }
}

TEST_CASE("pinv involution: pinv(pinv(M)) recovers M") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> size(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const MatrixXd m = random_matrix(rng, size(rng), size(rng));
    const auto p = pseudo_inverse(m);
    const auto pp = pseudo_inverse(p.pinv);
    CHECK(max_abs(pp.pinv - m) <= 1e3 * std::max(p.cutoff, 1e-12));
  }
}

TEST_CASE("symmetric input: pinv symmetric, commutes, psd iff pinv psd") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const MatrixXd a = random_matrix(rng, 4, 4);
    const MatrixXd m = symmetrized(a * a.transpose());  // psd
    const auto p = pseudo_inverse(m);
    CHECK(max_abs(p.pinv - p.pinv.transpose()) < 1e-10);
    CHECK(max_abs(m * p.pinv - p.pinv * m) < 1e-8);
    CHECK(definiteness(m, Definiteness::kPositiveSemi));
    CHECK(definiteness(p.pinv, Definiteness::kPositiveSemi));

    const MatrixXd neg = -m;
    const auto pn = pseudo_inverse(neg);
    CHECK(definiteness(neg, Definiteness::kNegativeSemi));
    CHECK(definiteness(pn.pinv, Definiteness::kNegativeSemi));
  }
}

TEST_CASE("range_inclusion") {
  SUBCASE("zero N is in any range") {
    CHECK(range_inclusion(MatrixXd::Zero(3, 2), MatrixXd::Random(3, 3)));
  }
  SUBCASE("coordinate subspaces of diag(1,0)") {
    MatrixXd m = MatrixXd::Zero(2, 2);
    m(0, 0) = 1.0;
    MatrixXd e1(2, 1), e2(2, 1);
    e1 << 1, 0;
    e2 << 0, 1;
    CHECK(range_inclusion(e1, m));
    CHECK_FALSE(range_inclusion(e2, m));
  }
  SUBCASE("scalar oracle at s = 0.5 of the singular-weight problem") {
    // R(s) = s^3/2 - s^2, P(s) = s^2 at s = 0.5: N = 0.25, M = 0.0625
    MatrixXd n(1, 1), m(1, 1);
    n << 0.25;
    m << 0.0625;
    CHECK(range_inclusion(n, m));
  }
  SUBCASE("inclusion implies M M^+ N = N") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
      const MatrixXd m = random_matrix(rng, 4, 3);
      const MatrixXd c = random_matrix(rng, 3, 2);
      const MatrixXd n = m * c;  // in range(M) by construction
      REQUIRE(range_inclusion(n, m));
      const auto p = pseudo_inverse(m);
      CHECK(max_abs(m * (p.pinv * n) - n) <= 1e-9 * std::max(1.0, max_abs(n)));
    }
  }
  SUBCASE("dimension mismatch throws") {
    CHECK_THROWS_AS(range_inclusion(MatrixXd::Zero(2, 1), MatrixXd::Zero(3, 3)),
                    std::invalid_argument);
  }
}

TEST_CASE("definiteness") {
  SUBCASE("zero matrix is both psd and nsd") {
    CHECK(definiteness(MatrixXd::Zero(3, 3), Definiteness::kPositiveSemi));
    CHECK(definiteness(MatrixXd::Zero(3, 3), Definiteness::kNegativeSemi));
  }
  SUBCASE("two-player sign blocks with P = 1") {
    // R11 + D1'PD1 = 1 + 1 = 2 psd; R22 + D2'PD2 = -1 + 1 = 0 nsd
    MatrixXd two(1, 1), zero(1, 1);
    two << 2.0;
    zero << 0.0;
    CHECK(definiteness(two, Definiteness::kPositiveSemi));
    CHECK(definiteness(zero, Definiteness::kNegativeSemi));
  }
  SUBCASE("indefinite diag(1,-1) fails psd") {
    MatrixXd m = MatrixXd::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    CHECK_FALSE(definiteness(m, Definiteness::kPositiveSemi));
    CHECK_FALSE(definiteness(m, Definiteness::kNegativeSemi));
  }
  SUBCASE("asymmetry beyond 1e6*tol throws") {
    MatrixXd m = MatrixXd::Zero(2, 2);
    m(0, 1) = 1.0;  // asymmetry 1 >> 1e6 * 1e-8
    CHECK_THROWS_AS(definiteness(m, Definiteness::kPositiveSemi), std::invalid_argument);
  }
  SUBCASE("empty matrix is vacuously definite") {
    CHECK(definiteness(MatrixXd(0, 0), Definiteness::kPositiveSemi));
    CHECK(definiteness(MatrixXd(0, 0), Definiteness::kNegativeSemi));
  }
}
