#include "sympos/core.hpp"

#include <cmath>

namespace sympos {

namespace detail {

void require_square(const Mat& A, const char* who) {
  if (A.rows() != A.cols() || A.rows() == 0)
    throw dimension_error(std::string(who) + ": matrix must be square, got " +
                          std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
}

void require_even(const Mat& A, const char* who) {
  require_square(A, who);
  if (A.rows() % 2 != 0)
    throw dimension_error(std::string(who) + ": dimension must be even, got " +
                          std::to_string(A.rows()));
}

void require_symmetric(const Mat& P, const char* who, double tol) {
  require_square(P, who);
  double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  double res = (P - P.transpose()).cwiseAbs().maxCoeff();
  if (res > tol * scale)
    throw dimension_error(std::string(who) + ": matrix must be symmetric, asymmetry " +
                          std::to_string(res));
}

}  // namespace detail

Mat standard_J(int dim) {
  if (dim <= 0 || dim % 2 != 0)
    throw dimension_error("standard_J: dimension must be a positive even number");
  Mat J = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; i += 2) {
    J(i + 1, i) = 1.0;
    J(i, i + 1) = -1.0;
  }
  return J;
}

double omega(const Vec& x, const Vec& y) {
  if (x.size() != y.size())
    throw dimension_error("omega: mismatched vector sizes");
  return y.dot(standard_J(static_cast<int>(x.size())) * x);
}

cplx omega(const CVec& x, const CVec& y) {
  if (x.size() != y.size())
    throw dimension_error("omega: mismatched vector sizes");
  CMat J = standard_J(static_cast<int>(x.size())).cast<cplx>();
  return (y.transpose() * (J * x))(0);
}

double symplectic_residual(const Mat& A) {
  detail::require_even(A, "symplectic_residual");
  Mat J = standard_J(static_cast<int>(A.rows()));
  return (A.transpose() * J * A - J).cwiseAbs().maxCoeff();
}

check_report is_symplectic(const Mat& A, double tol) {
  double r = symplectic_residual(A);
  double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  return {r <= tol * scale * scale, r};
}

check_report in_lie_algebra(const Mat& X, double tol) {
  detail::require_even(X, "in_lie_algebra");
  Mat J = standard_J(static_cast<int>(X.rows()));
  double r = (X.transpose() * J + J * X).cwiseAbs().maxCoeff();
  double scale = std::max(1.0, X.cwiseAbs().maxCoeff());
  return {r <= tol * scale, r};
}

SympMatrix::SympMatrix(Mat a, double tol) : m(std::move(a)) {
  auto rep = sympos::is_symplectic(m, tol);
  residual = rep.residual;
  if (!rep.ok)
    throw numerical_error("SympMatrix: symplectic residual " + std::to_string(rep.residual) +
                          " exceeds tolerance");
}

Generator::Generator(Mat p) : P(std::move(p)) {
  detail::require_symmetric(P, "Generator");
  Eigen::SelfAdjointEigenSolver<Mat> es(P);
  margin = es.eigenvalues().minCoeff();
}

namespace {

// Pade 13 coefficients for exp (Higham 2005).
constexpr double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

Mat expm_pade13(const Mat& X) {
  const int d = static_cast<int>(X.rows());
  const Mat I = Mat::Identity(d, d);
  const Mat X2 = X * X;
  const Mat X4 = X2 * X2;
  const Mat X6 = X2 * X4;
  const double* b = kPade13;
  Mat U = X * (X6 * (b[13] * X6 + b[11] * X4 + b[9] * X2) + b[7] * X6 + b[5] * X4 +
               b[3] * X2 + b[1] * I);
  Mat V = X6 * (b[12] * X6 + b[10] * X4 + b[8] * X2) + b[6] * X6 + b[4] * X4 + b[2] * X2 +
          b[0] * I;
  return (V - U).partialPivLu().solve(V + U);
}

}  // namespace

Mat expm(const Mat& X) {
  detail::require_square(X, "expm");
  const int d = static_cast<int>(X.rows());
  if (!X.allFinite()) throw numerical_error("expm: non-finite input");

  if (d == 2) {
    // exp((tr/2) I + X0) with X0 traceless; X0^2 = -det(X0) I.
    double half_tr = 0.5 * X.trace();
    Mat X0 = X - half_tr * Mat::Identity(2, 2);
    double det0 = X0(0, 0) * X0(1, 1) - X0(0, 1) * X0(1, 0);
    double c, s;
    if (det0 > 0) {
      double w = std::sqrt(det0);
      c = std::cos(w);
      s = (w > 0) ? std::sin(w) / w : 1.0;
    } else if (det0 < 0) {
      double w = std::sqrt(-det0);
      c = std::cosh(w);
      s = std::sinh(w) / w;
    } else {
      c = 1.0;
      s = 1.0;
    }
    return std::exp(half_tr) * (c * Mat::Identity(2, 2) + s * X0);
  }

  const double theta13 = 5.371920351148152;
  double nrm = X.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  int squarings = 0;
  Mat Xs = X;
  if (nrm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    Xs /= std::pow(2.0, squarings);
  }
  Mat E = expm_pade13(Xs);
  for (int i = 0; i < squarings; ++i) E = E * E;
  return E;
}

Mat symp_exp(const Mat& P, double t) {
  detail::require_even(P, "symp_exp");
  detail::require_symmetric(P, "symp_exp");
  Mat J = standard_J(static_cast<int>(P.rows()));
  return expm(t * (J * P));
}

Mat conjugate(const Mat& A, const Mat& X) {
  detail::require_even(A, "conjugate");
  if (X.rows() != A.rows() || X.cols() != A.cols())
    throw dimension_error("conjugate: X must match A's dimensions");
  auto rep = is_symplectic(X);
  if (!rep.ok)
    throw numerical_error("conjugate: X is not symplectic (residual " +
                          std::to_string(rep.residual) + ")");
  return X.partialPivLu().solve(A * X);
}

Mat random_spd(std::mt19937_64& rng, int dim, double spread) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat S(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) S(i, j) = g(rng);
  Mat P = S * S.transpose() + 0.05 * Mat::Identity(dim, dim);
  return spread * P;
}

Mat random_symplectic(std::mt19937_64& rng, int n, double spread) {
  if (n <= 0) throw dimension_error("random_symplectic: n must be positive");
  const int dim = 2 * n;
  Mat A = Mat::Identity(dim, dim);
  if (spread == 0.0) return A;
  std::uniform_int_distribution<int> nfac(2, 4);
  int k = nfac(rng);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int f = 0; f < k; ++f) {
    Mat S(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) S(i, j) = g(rng);
    Mat P = 0.5 * (S + S.transpose());
    A = symp_exp(P, spread / k) * A;
  }
  return A;
}

}  // namespace sympos
