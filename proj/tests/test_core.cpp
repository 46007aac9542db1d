#include "sympos/core.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace sympos;

namespace {

// Independent oracle: plain truncated series with its own scaling loop.
// Deliberately not the Pade route used by the library.
Mat exp_series_oracle(const Mat& X) {
  int k = 0;
  Mat Y = X;
  while (Y.cwiseAbs().maxCoeff() > 0.25) {
    Y *= 0.5;
    ++k;
  }
  Mat term = Mat::Identity(X.rows(), X.cols());
  Mat sum = term;
  for (int j = 1; j <= 40; ++j) {
    term = term * Y / static_cast<double>(j);
    sum += term;
  }
  for (int i = 0; i < k; ++i) sum = sum * sum;
  return sum;
}

Mat rot2(double t) {
  Mat R(2, 2);
  R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return R;
}

double rel_err(const Mat& A, const Mat& B) {
  return (A - B).cwiseAbs().maxCoeff() / std::max(1.0, B.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("standard_J blocks and J^2 = -Id") {
  Mat J2 = standard_J(2);
  CHECK(J2(0, 0) == 0.0);
  CHECK(J2(0, 1) == -1.0);
  CHECK(J2(1, 0) == 1.0);
  CHECK(J2(1, 1) == 0.0);

  for (int dim : {2, 4, 6, 8}) {
    Mat J = standard_J(dim);
    CHECK((J * J + Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((J + J.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(standard_J(3), dimension_error);
  CHECK_THROWS_AS(standard_J(0), dimension_error);
}

TEST_CASE("omega convention: omega(x,y) = y^T J x") {
  Vec x(2), y(2);
  x << 1.0, 0.0;
  y << 0.0, 1.0;
  // J x = e2, so omega(e1, e2) = e2 . e2 = 1.
  CHECK(omega(x, y) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(omega(y, x) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(omega(x, x) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("is_symplectic accepts rotations and flags garbage") {
  CHECK(is_symplectic(rot2(0.7)).ok);
  CHECK(is_symplectic(Mat::Identity(4, 4)).ok);
  Mat bad = Mat::Identity(4, 4);
  bad(0, 0) = 3.0;
  auto rep = is_symplectic(bad);
  CHECK(!rep.ok);
  CHECK(rep.residual > 1.0);
}

TEST_CASE("in_lie_algebra on J*symmetric and its complement") {
  std::mt19937_64 rng(12345);
  for (int dim : {2, 4, 6}) {
    Mat P = random_spd(rng, dim);
    Mat X = standard_J(dim) * P;
    auto rep = in_lie_algebra(X);
    CHECK(rep.ok);
    CHECK(rep.residual < 1e-12);
  }
  Mat Y = Mat::Identity(4, 4);
  CHECK(!in_lie_algebra(Y).ok);
}

TEST_CASE("expm matches independent series oracle") {
  std::mt19937_64 rng(20240801);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int dim : {2, 3, 4, 6}) {
    for (int rep = 0; rep < 20; ++rep) {
      Mat X(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) X(i, j) = g(rng);
      X *= (rep % 5 + 1) * 0.5;
      CHECK(rel_err(expm(X), exp_series_oracle(X)) < 1e-12);
    }
  }
}

TEST_CASE("symp_exp(I2, t) is the rotation rho(t)") {
  for (double t : {0.0, 0.3, M_PI / 2, M_PI, 5.0}) {
    CHECK(rel_err(symp_exp(Mat::Identity(2, 2), t), rot2(t)) < 1e-14);
  }
  Mat q = symp_exp(Mat::Identity(2, 2), M_PI / 2);
  CHECK(std::abs(q(0, 0)) < 1e-15);
  CHECK(q(0, 1) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(q(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("symp_exp one-parameter group property") {
  std::mt19937_64 rng(777);
  for (int dim : {2, 4, 6}) {
    Mat P = random_spd(rng, dim);
    Mat a = symp_exp(P, 0.4);
    Mat b = symp_exp(P, 0.9);
    Mat c = symp_exp(P, 1.3);
    CHECK(rel_err(a * b, c) < 1e-11);
    CHECK(rel_err(symp_exp(P, 0.0), Mat::Identity(dim, dim)) < 1e-15);
  }
}

TEST_CASE("symp_exp stays symplectic up to ||tJP|| = 10") {
  std::mt19937_64 rng(4242);
  for (int dim : {2, 4, 6}) {
    for (int rep = 0; rep < 10; ++rep) {
      Mat P = random_spd(rng, dim);
      double nrm = (standard_J(dim) * P).cwiseAbs().colwise().sum().maxCoeff();
      double t = 10.0 / nrm;
      Mat A = symp_exp(P, t);
      CHECK(symplectic_residual(A) < 1e-10 * std::max(1.0, A.cwiseAbs().maxCoeff() *
                                                               A.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("symp_exp rejects asymmetric generators and odd dims") {
  Mat P(2, 2);
  P << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(symp_exp(P, 1.0), dimension_error);
  CHECK_THROWS_AS(symp_exp(Mat::Identity(3, 3), 1.0), dimension_error);
}

TEST_CASE("conjugate preserves spectrum, validates X") {
  std::mt19937_64 rng(99);
  Mat A = random_symplectic(rng, 2, 0.8);
  Mat X = random_symplectic(rng, 2, 0.5);
  Mat B = conjugate(A, X);
  CHECK(is_symplectic(B).ok);
  Eigen::EigenSolver<Mat> ea(A), eb(B);
  Eigen::VectorXcd la = ea.eigenvalues(), lb = eb.eigenvalues();
  std::sort(la.data(), la.data() + la.size(),
            [](cplx a, cplx b) { return std::make_pair(a.real(), a.imag()) <
                                        std::make_pair(b.real(), b.imag()); });
  std::sort(lb.data(), lb.data() + lb.size(),
            [](cplx a, cplx b) { return std::make_pair(a.real(), a.imag()) <
                                        std::make_pair(b.real(), b.imag()); });
  CHECK((la - lb).cwiseAbs().maxCoeff() < 1e-9);

  Mat bad = 2.0 * Mat::Identity(4, 4);
  CHECK_THROWS_AS(conjugate(A, bad), numerical_error);
}

TEST_CASE("random_symplectic: symplectic, deterministic, spread 0 = Id") {
  std::mt19937_64 r1(5), r2(5);
  Mat A = random_symplectic(r1, 2, 1.0);
  Mat B = random_symplectic(r2, 2, 1.0);
  CHECK((A - B).cwiseAbs().maxCoeff() == 0.0);
  CHECK(is_symplectic(A).ok);
  std::mt19937_64 r3(5);
  CHECK((random_symplectic(r3, 3, 0.0) - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Generator certificate") {
  Mat P(2, 2);
  P << 2.0, -1.0, -1.0, 1.0;
  Generator gen(P);
  CHECK(gen.positive());
  CHECK(gen.margin == doctest::Approx(1.5 - std::sqrt(1.25)).epsilon(1e-12));
  Mat Q(2, 2);
  Q << 1.0, 0.0, 0.0, -1.0;
  CHECK(!Generator(Q).positive());
}

TEST_CASE("SympMatrix tags residual and rejects junk") {
  SympMatrix s(rot2(0.2));
  CHECK(s.residual < 1e-15);
  Mat bad = Mat::Identity(2, 2) * 1.5;
  CHECK_THROWS_AS(SympMatrix{bad}, numerical_error);
}
