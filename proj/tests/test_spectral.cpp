#include "sympos/spectral.hpp"

#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace sympos;

namespace {

Mat rot2(double t) {
  Mat R(2, 2);
  R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return R;
}

// Interleaved direct sum of 2x2 blocks (test-local copy).
Mat blk2(const Mat& B1, const Mat& B2) {
  Mat A = Mat::Zero(4, 4);
  A.block(0, 0, 2, 2) = B1;
  A.block(2, 2, 2, 2) = B2;
  return A;
}

// 4x4 symplectic with a quadruplet: C acting on a Lagrangian plane and
// (C^-1)^T on its J-complement, permuted from split to interleaved layout.
Mat lagrangian_pair(const Mat& C) {
  Mat As = Mat::Zero(4, 4);
  As.block(0, 0, 2, 2) = C;
  As.block(2, 2, 2, 2) = C.inverse().transpose();
  Mat Pm = Mat::Zero(4, 4);
  // split order (q1, q2, p1, p2) -> interleaved (q1, p1, q2, p2)
  Pm(0, 0) = Pm(1, 2) = Pm(2, 1) = Pm(3, 3) = 1.0;
  return Pm * As * Pm.transpose();
}

// Tracked angle of the eigenvalue of A nearest to ref.
cplx nearest_eig(const Mat& A, cplx ref) {
  Eigen::EigenSolver<Mat> es(A);
  cplx best = es.eigenvalues()(0);
  for (int i = 1; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i) - ref) < std::abs(best - ref))
      best = es.eigenvalues()(i);
  return best;
}

}  // namespace

TEST_CASE("Krein form: pinned value beta((1,-i),(1,-i)) = 2") {
  CVec v(2);
  v << cplx(1, 0), cplx(0, -1);
  cplx b = krein_form(v, v);
  CHECK(std::abs(b - cplx(2, 0)) < 1e-15);
}

TEST_CASE("Krein form is Hermitian and satisfies i*beta(v,Jv) = <v,v>") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int dim : {2, 4, 6}) {
    CMat J = standard_J(dim).cast<cplx>();
    for (int rep = 0; rep < 10; ++rep) {
      CVec v(dim), w(dim);
      for (int i = 0; i < dim; ++i) {
        v(i) = cplx(g(rng), g(rng));
        w(i) = cplx(g(rng), g(rng));
      }
      CHECK(std::abs(krein_form(v, w) - std::conj(krein_form(w, v))) < 1e-12);
      cplx lhs = cplx(0, 1) * krein_form(v, CVec(J * v));
      cplx rhs = (v.conjugate().transpose() * v)(0);
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("rho(pi/2): splitting +1 at i, -1 at -i") {
  Mat A = rot2(M_PI / 2);
  CHECK(splitting_number(A, cplx(0, 1)) == 1);
  CHECK(splitting_number(A, cplx(0, -1)) == -1);
  auto es = eigen_structure(A);
  REQUIRE(es.groups.size() == 1);
  CHECK(es.groups[0].kind == GroupKind::CirclePair);
  CHECK(std::abs(es.groups[0].lambda - cplx(0, 1)) < 1e-12);
  CHECK(es.groups[0].splitting.value() == 1);
}

TEST_CASE("eigen_structure on stock matrices") {
  SUBCASE("real pair") {
    Mat A(2, 2);
    A << 2.0, 0.0, 0.0, 0.5;
    auto es = eigen_structure(A);
    REQUIRE(es.groups.size() == 1);
    CHECK(es.groups[0].kind == GroupKind::RealPair);
    CHECK(std::abs(es.groups[0].lambda - cplx(2, 0)) < 1e-12);
    CHECK(es.groups[0].mult == 1);
  }
  SUBCASE("minus identity") {
    auto es = eigen_structure(-Mat::Identity(2, 2));
    REQUIRE(es.groups.size() == 1);
    CHECK(es.groups[0].kind == GroupKind::MinusOne);
    CHECK(es.groups[0].mult == 2);
    CHECK(es.groups[0].diagonalizable);
    CHECK(es.groups[0].splitting.value() == 0);
  }
  SUBCASE("two real pairs") {
    Mat A = blk2((Mat(2, 2) << 2, 0, 0, 0.5).finished(),
                 (Mat(2, 2) << 3, 0, 0, 1.0 / 3).finished());
    auto es = eigen_structure(A);
    REQUIRE(es.groups.size() == 2);
    CHECK(es.groups[0].kind == GroupKind::RealPair);
    CHECK(es.groups[1].kind == GroupKind::RealPair);
  }
  SUBCASE("circle plus real") {
    Mat A = blk2(rot2(0.9), (Mat(2, 2) << -2, 0, 0, -0.5).finished());
    auto es = eigen_structure(A);
    REQUIRE(es.groups.size() == 2);
    CHECK(es.groups[0].kind == GroupKind::RealPair);
    CHECK(es.groups[0].lambda.real() == doctest::Approx(-2.0));
    CHECK(es.groups[1].kind == GroupKind::CirclePair);
    CHECK(es.groups[1].splitting.value() == 1);
  }
  SUBCASE("quadruplet") {
    Mat A = lagrangian_pair(1.3 * rot2(0.8));
    REQUIRE(is_symplectic(A).ok);
    auto es = eigen_structure(A);
    REQUIRE(es.groups.size() == 1);
    CHECK(es.groups[0].kind == GroupKind::Quadruplet);
    CHECK(std::abs(es.groups[0].lambda - 1.3 * cplx(std::cos(0.8), std::sin(0.8))) <
          1e-9);
  }
  SUBCASE("Jordan pair at -1 next to a circle pair") {
    Mat N(2, 2);
    N << -1, 0, 1, -1;
    Mat A = blk2(rot2(0.7), N);
    auto es = eigen_structure(A);
    REQUIRE(es.groups.size() == 2);
    CHECK(es.groups[0].kind == GroupKind::MinusOne);
    CHECK(es.groups[0].mult == 2);
    CHECK(!es.groups[0].diagonalizable);
    CHECK(es.groups[1].kind == GroupKind::CirclePair);
  }
}

TEST_CASE("spectrum symmetry property across dims") {
  std::mt19937_64 rng(2025);
  for (int n : {1, 2, 3}) {
    for (int rep = 0; rep < 25; ++rep) {
      Mat A = random_symplectic(rng, n, 1.2);
      auto es = eigen_structure(A);
      int total = 0;
      for (const auto& g : es.groups) total += g.orbit_size();
      CHECK(total == 2 * n);
      // every orbit member is an eigenvalue
      for (const auto& g : es.groups) {
        for (cplx o : {g.lambda, std::conj(g.lambda), 1.0 / g.lambda}) {
          CMat M = A.cast<cplx>() - o * CMat::Identity(2 * n, 2 * n);
          Eigen::JacobiSVD<CMat> svd(M);
          CHECK(svd.singularValues()(2 * n - 1) < 1e-6 * (1.0 + A.cwiseAbs().maxCoeff()));
        }
      }
      CHECK(es.residual < 1e-6);
    }
  }
}

TEST_CASE("splitting is conjugation invariant and odd under conjugation of lambda") {
  std::mt19937_64 rng(888);
  for (int rep = 0; rep < 20; ++rep) {
    double th1 = 0.3 + 0.1 * rep, th2 = 2.9 - 0.07 * rep;
    Mat A = blk2(rot2(th1), rot2(th2));
    Mat X = random_symplectic(rng, 2, 0.6);
    Mat B = conjugate(A, X);
    cplx l1 = std::polar(1.0, th1);
    CHECK(splitting_number(A, l1) == 1);
    CHECK(splitting_number(A, std::conj(l1)) == -1);
    CHECK(splitting_number(B, l1) == splitting_number(A, l1));
  }
}

TEST_CASE("opposite rotation block gives splitting -1 on the upper label") {
  // rho(-th) has eigenvalue e^{ith} with eigenvector (1, i): beta < 0.
  Mat A = rot2(-0.9);
  CHECK(splitting_number(A, std::polar(1.0, 0.9)) == -1);
}

TEST_CASE("invariant_subspace spans an A-invariant space of the right dim") {
  Mat N(2, 2);
  N << -1, 0, 1, -1;
  Mat A = blk2(rot2(0.7), N);
  CMat B = invariant_subspace(A, cplx(-1, 0));
  CHECK(B.cols() == 2);
  // residual of invariance: A B = B M for M = B^+ A B
  CMat M = B.adjoint() * A.cast<cplx>() * B;
  CHECK((A.cast<cplx>() * B - B * M).cwiseAbs().maxCoeff() < 1e-9);

  CMat E = invariant_subspace(rot2(0.4), std::polar(1.0, 0.4));
  CHECK(E.cols() == 1);
}

TEST_CASE("krein_velocity: rotation examples and finite-difference oracle") {
  Mat A = rot2(1.0);
  cplx l = std::polar(1.0, 1.0);
  CHECK(krein_velocity(A, Mat::Identity(2, 2), l) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(krein_velocity(A, 2.0 * Mat::Identity(2, 2), l) ==
        doctest::Approx(2.0).epsilon(1e-10));

  // oracle: theta(t) from the tracked eigenvalue of exp(tJP) A, central diff
  std::mt19937_64 rng(515);
  for (int rep = 0; rep < 12; ++rep) {
    Mat A4 = blk2(rot2(0.5 + 0.1 * rep), rot2(2.5 - 0.05 * rep));
    Mat X = random_symplectic(rng, 2, 0.5);
    A4 = conjugate(A4, X);
    Mat P = random_spd(rng, 4, 0.8);
    cplx l0 = std::polar(1.0, 0.5 + 0.1 * rep);
    double v = krein_velocity(A4, P, l0);
    double h = 1e-6;
    cplx lp = nearest_eig(symp_exp(P, h) * A4, l0);
    cplx lm = nearest_eig(symp_exp(P, -h) * A4, l0);
    double fd = (std::arg(lp) - std::arg(lm)) / (2 * h);
    CHECK(v == doctest::Approx(fd).epsilon(1e-4));
    CHECK(v > 0.0);  // positive generator moves splitting-+1 eigenvalues anticlockwise
  }
}

TEST_CASE("krein_velocity rejects multiple eigenvalues") {
  Mat A = blk2(rot2(0.8), rot2(0.8));
  CHECK_THROWS_AS(krein_velocity(A, Mat::Identity(4, 4), std::polar(1.0, 0.8)),
                  numerical_error);
}

TEST_CASE("splitting_number rejects off-circle input") {
  Mat A(2, 2);
  A << 2.0, 0.0, 0.0, 0.5;
  CHECK_THROWS_AS(splitting_number(A, cplx(2, 0)), numerical_error);
}
