#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>
#include <stdexcept>
#include <string>

namespace sympos {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct unsupported_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kSympTol = 1e-9;

// Standard symplectic form in interleaved layout: J e_{2i-1} = e_{2i},
// i.e. 2x2 blocks [[0,-1],[1,0]] down the diagonal.
Mat standard_J(int dim);

// omega(x, y) = y^T J x for real or complexified arguments.
double omega(const Vec& x, const Vec& y);
cplx omega(const CVec& x, const CVec& y);

double symplectic_residual(const Mat& A);

struct check_report {
  bool ok = false;
  double residual = 0.0;
};

check_report is_symplectic(const Mat& A, double tol = kSympTol);

// Lie algebra test: A^T J + J A = 0, equivalently J A symmetric.
check_report in_lie_algebra(const Mat& X, double tol = kSympTol);

// A real 2n x 2n matrix tagged with its symplectic residual.
struct SympMatrix {
  Mat m;
  double residual = 0.0;

  SympMatrix() = default;
  explicit SympMatrix(Mat a, double tol = kSympTol);
};

// Symmetric generator with a definiteness certificate (smallest eigenvalue).
struct Generator {
  Mat P;
  double margin = 0.0;

  Generator() = default;
  explicit Generator(Mat p);
  bool positive() const { return margin > 0.0; }
};

// General dense matrix exponential (scaling-and-squaring, Pade 13).
Mat expm(const Mat& X);

// exp(t J P) for symmetric P; closed form for 2x2, Pade kernel otherwise.
// Result is symplectic to 1e-10 for ||t J P|| <= 10.
Mat symp_exp(const Mat& P, double t);

// X^{-1} A X for symplectic X (validated).
Mat conjugate(const Mat& A, const Mat& X);

// Product of a few random symplectic exponentials; spread 0 gives the identity.
Mat random_symplectic(std::mt19937_64& rng, int n, double spread = 1.0);

Mat random_spd(std::mt19937_64& rng, int dim, double spread = 1.0);

namespace detail {
void require_square(const Mat& A, const char* who);
void require_even(const Mat& A, const char* who);
void require_symmetric(const Mat& P, const char* who, double tol = 1e-12);
}  // namespace detail

}  // namespace sympos
