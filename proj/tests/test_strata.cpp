#include "doctest.h"

#include "sympos/strata.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace sympos;

namespace {

constexpr double kPi = std::numbers::pi;

Mat rot2(double theta) { return rep_rotation(theta); }

Mat diag2(double l) { return rep_real(l); }

Mat conj_by_random(const Mat& A, unsigned seed, double spread = 0.6) {
  std::mt19937_64 rng(seed);
  Mat X = random_symplectic(rng, static_cast<int>(A.rows()) / 2, spread);
  return conjugate(A, X);
}

Mat random_pd(unsigned seed, int dim) {
  std::mt19937_64 rng(seed);
  Mat S = random_spd(rng, dim);
  // push eigenvalues away from zero so flow directions are unambiguous
  return S + 0.5 * Mat::Identity(dim, dim);
}

// Characteristic polynomial coefficients straight from the eigenvalues,
// independent of the trace formulas under test.
std::pair<double, double> char_poly_sigma(const Mat& A) {
  Eigen::EigenSolver<Mat> es(A);
  auto ev = es.eigenvalues();
  cplx s1 = 0, s2 = 0;
  for (int i = 0; i < ev.size(); ++i) {
    s1 += ev(i);
    for (int j = i + 1; j < ev.size(); ++j) s2 += ev(i) * ev(j);
  }
  return {s1.real(), s2.real()};
}

}  // namespace

TEST_CASE("sym_funcs matches the characteristic polynomial") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    Mat A = random_symplectic(rng, 2, 0.8);
    auto [s1, s2] = char_poly_sigma(A);
    SymFuncs f = sym_funcs(A);
    CHECK(f.sigma1 == doctest::Approx(s1).epsilon(1e-9));
    CHECK(f.sigma2 == doctest::Approx(s2).epsilon(1e-9));
    CHECK(f.disc == doctest::Approx(s2 - s1 * s1 / 4.0 - 2.0).epsilon(1e-9));
  }
}

TEST_CASE("disc separates the open strata") {
  CHECK(sym_funcs(blk(rot2(0.8), rot2(1.7))).disc < 0);        // O_U
  CHECK(sym_funcs(blk(diag2(2.0), diag2(3.5))).disc < 0);      // O_R
  CHECK(sym_funcs(blk(rot2(0.8), diag2(2.0))).disc < 0);       // O_UR
  CHECK(sym_funcs(rep_quadruplet(cplx(1.2, 0.9))).disc > 0);   // O_C
  // the double-pair boundary sits exactly on disc = 0
  CHECK(std::abs(sym_funcs(rep_real_double(2.0, 1.0)).disc) < 1e-12);
  CHECK(std::abs(sym_funcs(rep_circle_nilpotent(cplx(std::cos(0.9), std::sin(0.9)), '+')).disc) < 1e-12);
}

TEST_CASE("representative builders produce symplectic matrices of the right class") {
  CHECK(is_symplectic(rep_rotation(0.7)).ok);
  CHECK(is_symplectic(rep_real(2.0)).ok);
  CHECK(is_symplectic(rep_nilpotent_pm1(1.0, '+')).ok);
  CHECK(is_symplectic(rep_nilpotent_pm1(-1.0, '-')).ok);
  CHECK(is_symplectic(rep_quadruplet(cplx(1.3, 0.6))).ok);
  CHECK(is_symplectic(rep_circle_nilpotent(std::polar(1.0, 2.1), '-')).ok);
  CHECK(is_symplectic(rep_real_double(2.0, 1.0)).ok);
  CHECK(is_symplectic(rep_real_double(2.0, -0.7)).ok);

  CHECK(classify(rep_rotation(0.7)).region == Region::O_U_plus);
  CHECK(classify(rep_rotation(-0.7)).region == Region::O_U_minus);
  CHECK(classify(rep_real(2.0)).region == Region::O_R_plus);
  CHECK(classify(rep_real(-2.0)).region == Region::O_R_minus);
  CHECK(classify(rep_quadruplet(cplx(1.3, 0.6))).region == Region::O_C);
  CHECK(classify(rep_real_double(2.0, 1.0)).region == Region::B_R);
  CHECK(classify(rep_real_double(2.0, -0.4)).region == Region::B_R);
  CHECK(classify(rep_circle_nilpotent(std::polar(1.0, 0.9), '+')).region == Region::B_U);
}

TEST_CASE("pinned nilpotent signs at -1 and +1") {
  Mat Nm_plus(2, 2), Nm_minus(2, 2), Np_plus(2, 2), Np_minus(2, 2);
  Nm_plus << -1, 0, -1, -1;
  Nm_minus << -1, 0, 1, -1;
  Np_plus << 1, 0, 1, 1;
  Np_minus << 1, 0, -1, 1;

  CHECK(nilpotent_sign(Nm_plus, cplx(-1, 0)) == '+');
  CHECK(nilpotent_sign(Nm_minus, cplx(-1, 0)) == '-');
  CHECK(nilpotent_sign(Np_plus, cplx(1, 0)) == '+');
  CHECK(nilpotent_sign(Np_minus, cplx(1, 0)) == '-');

  CHECK(rep_nilpotent_pm1(-1.0, '+').isApprox(Nm_plus));
  CHECK(rep_nilpotent_pm1(-1.0, '-').isApprox(Nm_minus));
  CHECK(rep_nilpotent_pm1(1.0, '+').isApprox(Np_plus));
  CHECK(rep_nilpotent_pm1(1.0, '-').isApprox(Np_minus));

  StratumLabel lab = classify(Nm_minus);
  CHECK(lab.region == Region::AtMinusOne);
  REQUIRE(lab.nilpotent_sign.has_value());
  CHECK(*lab.nilpotent_sign == '-');

  CHECK_FALSE(classify(-Mat::Identity(2, 2)).nilpotent_sign.has_value());
}

TEST_CASE("nilpotent sign is a conjugation invariant") {
  for (unsigned seed = 0; seed < 8; ++seed) {
    for (double l : {1.0, -1.0}) {
      for (char s : {'+', '-'}) {
        Mat A = conj_by_random(rep_nilpotent_pm1(l, s), 100 + seed);
        StratumLabel lab = classify(A);
        CHECK(lab.region == (l > 0 ? Region::AtPlusOne : Region::AtMinusOne));
        REQUIRE(lab.nilpotent_sign.has_value());
        CHECK(*lab.nilpotent_sign == s);
      }
    }
    for (char s : {'+', '-'}) {
      cplx l = std::polar(1.0, 0.6 + 0.2 * seed);
      Mat A = conj_by_random(rep_circle_nilpotent(l, s), 200 + seed);
      StratumLabel lab = classify(A);
      CHECK(lab.region == Region::B_U);
      REQUIRE(lab.nilpotent_sign.has_value());
      CHECK(*lab.nilpotent_sign == s);
    }
  }
}

TEST_CASE("positive flow enters the circle through '+' classes and leaves through '-'") {
  // independent dynamics oracle for the sign semantics: classify e^{tJP} N
  // for small t > 0 and positive definite P
  const double t = 5e-3;
  for (unsigned seed = 0; seed < 5; ++seed) {
    Mat P = random_pd(300 + seed, 2);
    auto flow = [&](const Mat& N) { return Mat(symp_exp(P, t) * N); };

    CHECK(classify(flow(rep_nilpotent_pm1(1.0, '+'))).region == Region::O_U_plus);
    CHECK(classify(flow(rep_nilpotent_pm1(1.0, '-'))).region == Region::O_R_plus);
    CHECK(classify(flow(rep_nilpotent_pm1(-1.0, '+'))).region == Region::O_U_minus);
    CHECK(classify(flow(rep_nilpotent_pm1(-1.0, '-'))).region == Region::O_R_minus);

    // and the reverse directions for t < 0
    auto back = [&](const Mat& N) { return Mat(symp_exp(P, -t) * N); };
    CHECK(classify(back(rep_nilpotent_pm1(1.0, '+'))).region == Region::O_R_plus);
    CHECK(classify(back(rep_nilpotent_pm1(1.0, '-'))).region == Region::O_U_minus);
  }
}

TEST_CASE("positive flow at a circle Jordan pair splits along or off the circle by sign") {
  const double t = 4e-3;
  for (unsigned seed = 0; seed < 5; ++seed) {
    Mat P = random_pd(400 + seed, 4);
    for (double theta : {0.8, 2.3}) {
      cplx l = std::polar(1.0, theta);
      Mat plus = symp_exp(P, t) * rep_circle_nilpotent(l, '+');
      Mat minus = symp_exp(P, t) * rep_circle_nilpotent(l, '-');
      CHECK(classify(plus).region == Region::O_U);
      CHECK(classify(minus).region == Region::O_C);
    }
  }
}

TEST_CASE("trace moves at rate -r c at the +-1 Jordan classes") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    Mat P = random_spd(rng, 2);
    for (double l : {1.0, -1.0}) {
      for (char s : {'+', '-'}) {
        Mat N = rep_nilpotent_pm1(l, s);
        double c = N(1, 0);
        double predicted = -P(1, 1) * c;
        double measured = (standard_J(2) * P * N).trace();
        CHECK(measured == doctest::Approx(predicted).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("classification of assembled 4x4 strata") {
  CHECK(classify(blk(rot2(0.8), rot2(1.9))).region == Region::O_U);
  CHECK(classify(blk(diag2(2.0), diag2(1.7))).region == Region::O_R_plus);
  CHECK(classify(blk(diag2(2.0), diag2(-1.7))).region == Region::O_R_minus);
  CHECK(classify(blk(diag2(-2.0), diag2(-1.7))).region == Region::O_R_minus);
  CHECK(classify(blk(rot2(1.1), diag2(2.5))).region == Region::O_UR);
  CHECK(classify(blk(rot2(1.1), diag2(-2.5))).region == Region::O_UR);

  StratumLabel bur = classify(blk(rot2(1.1), rep_nilpotent_pm1(-1.0, '+')));
  CHECK(bur.region == Region::B_UR);
  REQUIRE(bur.nilpotent_sign.has_value());
  CHECK(*bur.nilpotent_sign == '+');

  StratumLabel bru = classify(blk(diag2(3.0), rep_nilpotent_pm1(1.0, '-')));
  CHECK(bru.region == Region::B_RU);
  REQUIRE(bru.nilpotent_sign.has_value());
  CHECK(*bru.nilpotent_sign == '-');

  CHECK(classify(Mat::Identity(4, 4)).region == Region::AtPlusOne);
  CHECK(classify(-Mat::Identity(4, 4)).region == Region::AtMinusOne);

  // codimension >= 2 configurations
  CHECK(classify(blk(rot2(0.9), rot2(-0.9))).region == Region::NonGeneric);
  CHECK(classify(blk(diag2(2.0), diag2(2.0))).region == Region::NonGeneric);
  CHECK(classify(blk(rep_nilpotent_pm1(1.0, '+'), rep_nilpotent_pm1(-1.0, '-'))).region ==
        Region::NonGeneric);
  CHECK(classify(blk(rot2(1.2), -Mat::Identity(2, 2))).region == Region::NonGeneric);
}

TEST_CASE("classification survives symplectic conjugation") {
  struct Case {
    Mat A;
    Region region;
  };
  std::vector<Case> cases = {
      {blk(rot2(0.8), rot2(1.9)), Region::O_U},
      {blk(rot2(0.8), rot2(0.8)), Region::O_U},
      {blk(diag2(2.0), diag2(1.7)), Region::O_R_plus},
      {blk(diag2(-2.0), diag2(1.7)), Region::O_R_minus},
      {blk(rot2(1.1), diag2(2.5)), Region::O_UR},
      {rep_quadruplet(cplx(1.2, 0.7)), Region::O_C},
      {rep_real_double(2.0, 1.0), Region::B_R},
      {rep_real_double(-2.0, 0.5), Region::B_R},
      {rep_circle_nilpotent(std::polar(1.0, 1.3), '-'), Region::B_U},
      {blk(rot2(1.1), rep_nilpotent_pm1(-1.0, '-')), Region::B_UR},
      {blk(diag2(-3.0), rep_nilpotent_pm1(-1.0, '+')), Region::B_RU},
  };
  for (const auto& cs : cases) {
    for (unsigned seed = 0; seed < 6; ++seed) {
      Mat A = conj_by_random(cs.A, 500 + seed);
      CHECK(classify(A).region == cs.region);
    }
  }
}

TEST_CASE("boundary detection tolerates tiny symplectic perturbations") {
  Mat B = rep_real_double(2.0, 1.0);
  std::mt19937_64 rng(77);
  Mat P = random_spd(rng, 4);
  CHECK(classify(Mat(symp_exp(P, 1e-10) * B)).region == Region::B_R);
  Region moved = classify(Mat(symp_exp(P, 1e-3) * B)).region;
  CHECK(moved != Region::B_R);
  CHECK((moved == Region::O_C || moved == Region::O_R_plus || moved == Region::O_UR ||
         moved == Region::O_U));
}

TEST_CASE("normal form reduces each supported class to its representative") {
  struct Case {
    Mat N;
  };
  std::vector<Mat> reps = {
      rot2(0.8),
      rot2(-1.2),
      diag2(2.0),
      diag2(-2.0),
      rep_nilpotent_pm1(1.0, '+'),
      rep_nilpotent_pm1(1.0, '-'),
      rep_nilpotent_pm1(-1.0, '+'),
      rep_nilpotent_pm1(-1.0, '-'),
      blk(rot2(0.8), rot2(1.9)),
      blk(rot2(0.8), rot2(0.8)),
      blk(diag2(2.0), diag2(1.7)),
      blk(diag2(-2.0), diag2(1.7)),
      blk(rot2(1.1), diag2(2.5)),
      rep_quadruplet(cplx(1.2, 0.7)),
      rep_circle_nilpotent(std::polar(1.0, 1.3), '+'),
      rep_circle_nilpotent(std::polar(1.0, 1.3), '-'),
      rep_real_double(2.0, 1.0),
      rep_real_double(-2.0, 0.5),
      blk(rot2(1.1), rep_nilpotent_pm1(-1.0, '-')),
      blk(diag2(3.0), rep_nilpotent_pm1(1.0, '+')),
  };
  for (size_t k = 0; k < reps.size(); ++k) {
    for (unsigned seed = 0; seed < 4; ++seed) {
      Mat A = conj_by_random(reps[k], 900 + 10 * static_cast<unsigned>(k) + seed, 0.5);
      NormalForm nf = normal_form(A);
      CHECK(is_symplectic(nf.X, 1e-7).ok);
      CHECK(nf.residual < 1e-7);
      Mat recovered = conjugate(A, nf.X);
      CHECK((recovered - nf.N).cwiseAbs().maxCoeff() < 1e-6);
      CHECK(classify(nf.N).region == classify(A).region);
    }
  }
}

TEST_CASE("normal form of a quadruplet uses the canonical splitting") {
  Mat A = conj_by_random(rep_quadruplet(cplx(1.4, 0.5)), 42);
  NormalForm nf = normal_form(A);
  EigenStructure es = eigen_structure(A);
  CHECK((nf.N - rep_quadruplet(es.groups[0].lambda)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("normal form rejects what it cannot reduce") {
  CHECK_THROWS_AS(normal_form(blk(rot2(0.9), rot2(-0.9))), unsupported_error);
  Mat id4 = Mat::Identity(4, 4);
  NormalForm nf = normal_form(id4);
  CHECK(nf.N.isApprox(id4));
  Mat bad = blk(rep_nilpotent_pm1(1.0, '+'), rep_nilpotent_pm1(1.0, '+'));
  CHECK_THROWS(normal_form(bad));
}

TEST_CASE("region names round-trip") {
  for (Region r : {Region::O_U_plus, Region::O_C, Region::B_UR, Region::NonGeneric}) {
    auto back = region_from_string(to_string(r));
    REQUIRE(back.has_value());
    CHECK(*back == r);
  }
  CHECK_FALSE(region_from_string("bogus").has_value());
}

TEST_CASE("real double family flows off its boundary at the documented rate") {
  // d/dt (sigma2 - sigma1^2/4) along e^{tJP} A(lambda, alpha) at t = 0 equals
  // P(0,3) alpha (sqrt(l) - l^{-3/2})^2, which is -2.25 alpha at l = 2 here
  Mat P(4, 4);
  P << 1, 0, 0, -2, 0, 5, 0, 0, 0, 0, 1, 0, -2, 0, 0, 5;
  CHECK(Eigen::SelfAdjointEigenSolver<Mat>(P).eigenvalues().minCoeff() > 0);
  for (double alpha : {1.0, -1.0, 0.35}) {
    Mat A = rep_real_double(2.0, alpha);
    Mat J = standard_J(4);
    Mat Ad = J * P * A;
    double s1 = A.trace();
    double s1d = Ad.trace();
    double s2d = s1 * s1d - (Ad * A).trace();
    double rate = s2d - s1 * s1d / 2.0;
    CHECK(rate == doctest::Approx(-2.25 * alpha).epsilon(1e-10));

    // finite-difference confirmation on disc itself
    double h = 1e-6;
    double d0 = sym_funcs(Mat(symp_exp(P, -h) * A)).disc;
    double d1 = sym_funcs(Mat(symp_exp(P, h) * A)).disc;
    CHECK((d1 - d0) / (2 * h) == doctest::Approx(-2.25 * alpha).epsilon(1e-4));

    // alpha < 0 pushes into the quadruplet region, alpha > 0 into two real pairs
    Region after = classify(Mat(symp_exp(P, 1e-3) * A)).region;
    if (alpha < 0)
      CHECK(after == Region::O_C);
    else
      CHECK(after == Region::O_R_plus);
  }
}
