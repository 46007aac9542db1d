#include "sympos/strata.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>

namespace sympos {

const char* to_string(Region r) {
  switch (r) {
    case Region::O_U_plus: return "O_U_plus";
    case Region::O_U_minus: return "O_U_minus";
    case Region::O_U: return "O_U";
    case Region::O_C: return "O_C";
    case Region::O_R_plus: return "O_R_plus";
    case Region::O_R_minus: return "O_R_minus";
    case Region::O_UR: return "O_UR";
    case Region::B_U: return "B_U";
    case Region::B_R: return "B_R";
    case Region::B_UR: return "B_UR";
    case Region::B_RU: return "B_RU";
    case Region::AtPlusOne: return "AtPlusOne";
    case Region::AtMinusOne: return "AtMinusOne";
    case Region::NonGeneric: return "NonGeneric";
  }
  return "?";
}

std::optional<Region> region_from_string(const std::string& s) {
  for (Region r : {Region::O_U_plus, Region::O_U_minus, Region::O_U, Region::O_C,
                   Region::O_R_plus, Region::O_R_minus, Region::O_UR, Region::B_U,
                   Region::B_R, Region::B_UR, Region::B_RU, Region::AtPlusOne,
                   Region::AtMinusOne, Region::NonGeneric})
    if (s == to_string(r)) return r;
  return std::nullopt;
}

SymFuncs sym_funcs(const Mat& A) {
  detail::require_even(A, "sym_funcs");
  SymFuncs f;
  f.sigma1 = A.trace();
  if (A.rows() == 2) {
    f.sigma2 = 0.0;
    f.disc = f.sigma1 * f.sigma1 - 4.0;
  } else if (A.rows() == 4) {
    f.sigma2 = 0.5 * (f.sigma1 * f.sigma1 - (A * A).trace());
    f.disc = f.sigma2 - f.sigma1 * f.sigma1 / 4.0 - 2.0;
  } else {
    throw dimension_error("sym_funcs: only dims 2 and 4");
  }
  return f;
}

Mat rep_rotation(double theta) {
  Mat R(2, 2);
  R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return R;
}

Mat rep_real(double lambda) {
  if (lambda == 0.0) throw dimension_error("rep_real: lambda must be nonzero");
  Mat D(2, 2);
  D << lambda, 0.0, 0.0, 1.0 / lambda;
  return D;
}

Mat rep_nilpotent_pm1(double lambda, char sign) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12 || (sign != '+' && sign != '-'))
    throw dimension_error("rep_nilpotent_pm1: lambda must be +-1, sign '+' or '-'");
  // Calibration: at -1 the '+' class is [[-1,0],[-1,-1]]; at +1 the '+'
  // (circle-entry) class is [[1,0],[1,1]]. Both satisfy lambda*omega(v,Nv) >= 0.
  double c = (lambda < 0) ? -1.0 : 1.0;
  if (sign == '-') c = -c;
  Mat N(2, 2);
  N << lambda, 0.0, c, lambda;
  return N;
}

Mat blk(const Mat& B1, const Mat& B2) {
  Mat A = Mat::Zero(B1.rows() + B2.rows(), B1.cols() + B2.cols());
  A.topLeftCorner(B1.rows(), B1.cols()) = B1;
  A.bottomRightCorner(B2.rows(), B2.cols()) = B2;
  return A;
}

namespace {

// J-invariant complex splitting of C^4: V = span(v0, w0) with
// beta(v0,v0) = beta(w0,w0) = 0 and beta(v0,w0) = i.
CMat canonical_v_basis() {
  CMat U(4, 4);
  const double s = 1.0 / std::sqrt(2.0);
  CVec v0(4), w0(4);
  v0 << cplx(s, 0), 0, cplx(0, s), 0;
  w0 << 0, cplx(-s, 0), 0, cplx(0, -s);  // -J v0
  U.col(0) = v0;
  U.col(1) = w0;
  U.col(2) = v0.conjugate();
  U.col(3) = w0.conjugate();
  return U;
}

Mat from_v_block(const CMat& M) {
  CMat U = canonical_v_basis();
  CMat block = CMat::Zero(4, 4);
  block.topLeftCorner(2, 2) = M;
  block.bottomRightCorner(2, 2) = M.conjugate();
  CMat Ac = U * block * U.adjoint();
  if (Ac.imag().cwiseAbs().maxCoeff() > 1e-12)
    throw numerical_error("from_v_block: construction lost realness");
  return Ac.real();
}

CVec fix_phase(CVec v) {
  int imax = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
  cplx z = v(imax);
  if (std::abs(z) > 0) v *= std::conj(z) / std::abs(z);
  return v;
}

Vec fix_sign(Vec v) {
  int imax = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
  if (v(imax) < 0) v = -v;
  return v;
}

CVec complex_eigvec(const Mat& A, cplx lambda) {
  const int d = static_cast<int>(A.rows());
  CMat M = A.cast<cplx>() - lambda * CMat::Identity(d, d);
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullV);
  return fix_phase(svd.matrixV().col(d - 1));
}

// Real basis of the 2-dim invariant subspace ker (A - lambda)^2 for real
// lambda (used at +-1 and for double real pairs).
Mat real_cluster_basis(const Mat& A, double lambda) {
  const int d = static_cast<int>(A.rows());
  Mat M = (A - lambda * Mat::Identity(d, d));
  M = M * M;
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(2);
}

CMat complex_cluster_basis(const Mat& A, cplx lambda) {
  const int d = static_cast<int>(A.rows());
  CMat M = A.cast<cplx>() - lambda * CMat::Identity(d, d);
  M = M * M;
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(2);
}

// Sign of the semidefinite form lambda * omega(x, (A - lambda) x) on a real
// invariant plane at lambda = +-1; '+' is the circle-entry class.
char real_nilpotent_sign(const Mat& A, double lambda, const Mat& basis) {
  const int d = static_cast<int>(A.rows());
  Mat N = A - lambda * Mat::Identity(d, d);
  Mat J = standard_J(d);
  Mat Q = basis.transpose() * N.transpose() * J * basis;
  Mat S = 0.5 * (Q + Q.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  double lo = es.eigenvalues()(0), hi = es.eigenvalues()(1);
  double dominant = (std::abs(lo) > std::abs(hi)) ? lo : hi;
  double minor = (std::abs(lo) > std::abs(hi)) ? hi : lo;
  if (std::abs(dominant) < 1e-9 * (1.0 + A.cwiseAbs().maxCoeff()))
    throw numerical_error("nilpotent_sign: form vanishes (diagonalizable input?)");
  if (std::abs(minor) > 0.25 * std::abs(dominant))
    throw numerical_error("nilpotent_sign: form is not semidefinite");
  return (lambda * dominant > 0) ? '+' : '-';
}

struct CircleJordanData {
  CVec v;    // eigenvector (unit)
  CVec w0;   // orthonormal complement inside the cluster plane
  cplx mu0;  // (A - lambda) w0 = mu0 v (+ small)
  cplx d;    // beta(v, w0)
};

CircleJordanData circle_jordan_data(const Mat& A, cplx lambda) {
  CMat V = complex_cluster_basis(A, lambda);
  const int d = static_cast<int>(A.rows());
  CMat M = V.adjoint() * A.cast<cplx>() * V;  // 2x2 restriction
  Eigen::JacobiSVD<CMat> svd(M - lambda * CMat::Identity(2, 2), Eigen::ComputeFullV);
  CVec vc = svd.matrixV().col(1);
  CVec wc(2);
  wc << -std::conj(vc(1)), std::conj(vc(0));  // orthonormal complement
  CircleJordanData out;
  out.v = fix_phase(V * vc);
  out.w0 = V * wc;
  // re-extract after the phase fix
  out.mu0 = out.v.adjoint() * ((A.cast<cplx>() - lambda * CMat::Identity(d, d)) * out.w0);
  out.d = krein_form(out.v, out.w0);
  if (std::abs(out.d) < 1e-10)
    throw numerical_error("nilpotent_sign: degenerate Krein pairing on the cluster");
  return out;
}

// Sign of Re(conj(lambda) mu) after normalizing beta(v,w) = i: computed as
// sign of Re(-i conj(lambda) mu0 d).
char circle_nilpotent_sign(const Mat& A, cplx lambda) {
  CircleJordanData jd = circle_jordan_data(A, lambda);
  if (std::abs(jd.mu0) < 1e-9 * (1.0 + A.cwiseAbs().maxCoeff()))
    throw numerical_error("nilpotent_sign: form vanishes (diagonalizable input?)");
  double r = (cplx(0, -1) * std::conj(lambda) * jd.mu0 * jd.d).real();
  return (r > 0) ? '+' : '-';
}

struct BlockForm {
  Mat cols;  // 2n x 2 basis columns
  Mat rep;   // 2x2 canonical block
  cplx sort_key;
};

// Circle pair of multiplicity 1: block rho(theta) with theta in (0,pi) when
// the upper eigenvalue has splitting +1, rho(2pi - theta) when -1.
BlockForm circle_block(const Mat& A, cplx lambda, int splitting) {
  CVec v = complex_eigvec(A, lambda);
  Vec a = v.real(), b = v.imag();
  double theta = std::arg(lambda);
  BlockForm f;
  f.sort_key = lambda;
  Mat cols(A.rows(), 2);
  if (splitting > 0) {
    cols.col(0) = b;
    cols.col(1) = a;
    f.rep = rep_rotation(theta);
  } else {
    cols.col(0) = -b;
    cols.col(1) = a;
    f.rep = rep_rotation(2.0 * std::numbers::pi - theta);
  }
  double c = omega(Vec(cols.col(0)), Vec(cols.col(1)));
  if (c <= 0) throw numerical_error("normal_form: circle block lost orientation");
  f.cols = cols / std::sqrt(c);
  return f;
}

BlockForm real_block(const Mat& A, double lambda) {
  const int d = static_cast<int>(A.rows());
  Mat M1 = A - lambda * Mat::Identity(d, d);
  Mat M2 = A - (1.0 / lambda) * Mat::Identity(d, d);
  Eigen::JacobiSVD<Mat> s1(M1, Eigen::ComputeFullV), s2(M2, Eigen::ComputeFullV);
  Vec u = fix_sign(s1.matrixV().col(d - 1));
  Vec s = s2.matrixV().col(d - 1);
  double c = omega(u, s);
  if (std::abs(c) < 1e-12)
    throw numerical_error("normal_form: degenerate real pair pairing");
  BlockForm f;
  f.sort_key = lambda;
  f.cols = Mat(d, 2);
  // balance the pair: diagonal rescaling commutes with rep_real and halves
  // the condition number when the eigenvectors are nearly omega-orthogonal
  double k = std::sqrt(1.0 / std::abs(c));
  f.cols.col(0) = u * k;
  f.cols.col(1) = s / (c * k);
  f.rep = rep_real(lambda);
  return f;
}

// Jordan block at lambda = +-1 on a given invariant plane, normalized to
// rep_nilpotent_pm1(lambda, sign).
BlockForm pm1_jordan_block(const Mat& A, double lambda, const Mat& basis, char sign) {
  const int d = static_cast<int>(A.rows());
  Mat N = A - lambda * Mat::Identity(d, d);
  // restriction of N to the plane
  Mat Nr = basis.transpose() * N * basis;
  Eigen::JacobiSVD<Mat> svd(Nr, Eigen::ComputeFullV);
  Vec u2c = svd.matrixV().col(1);       // kernel direction
  Vec u1c(2);
  u1c << -u2c(1), u2c(0);
  Vec u2 = fix_sign(basis * u2c);
  Vec u1 = basis * u1c;
  Vec Nu1 = N * u1;
  double gamma = u2.dot(Nu1) / u2.squaredNorm();
  if (std::abs(gamma) < 1e-10)
    throw numerical_error("normal_form: Jordan chain collapsed at +-1");
  double w12 = omega(u1, u2);
  Mat rep = rep_nilpotent_pm1(lambda, sign);
  double c = rep(1, 0);
  double s2 = c / (gamma * w12);
  if (s2 <= 0)
    throw numerical_error("normal_form: nilpotent sign mismatch at +-1");
  double sc = std::sqrt(s2);
  BlockForm f;
  f.sort_key = lambda;
  f.cols = Mat(d, 2);
  f.cols.col(0) = sc * u1;
  f.cols.col(1) = (sc * gamma / c) * u2;
  f.rep = rep;
  return f;
}

NormalForm assemble_blocks(const Mat& A, std::vector<BlockForm> blocks) {
  std::sort(blocks.begin(), blocks.end(), [](const BlockForm& x, const BlockForm& y) {
    if (x.sort_key.real() != y.sort_key.real())
      return x.sort_key.real() < y.sort_key.real();
    return x.sort_key.imag() < y.sort_key.imag();
  });
  const int d = static_cast<int>(A.rows());
  NormalForm nf;
  nf.X = Mat(d, d);
  nf.N = Mat::Zero(d, d);
  int at = 0;
  for (const auto& b : blocks) {
    nf.X.block(0, at, d, 2) = b.cols;
    nf.N.block(at, at, 2, 2) = b.rep;
    at += 2;
  }
  auto rep = is_symplectic(nf.X, 1e-6);
  if (!rep.ok)
    throw numerical_error("normal_form: assembled basis is not symplectic (residual " +
                          std::to_string(rep.residual) + ")");
  nf.residual = (A * nf.X - nf.X * nf.N).cwiseAbs().maxCoeff() /
                (1.0 + A.cwiseAbs().maxCoeff());
  return nf;
}

// O_C form: A|V = diag(lambda, 1/conj(lambda)) on the canonical splitting.
NormalForm quadruplet_form(const Mat& A, cplx lambda) {
  CVec v = complex_eigvec(A, lambda);
  CVec w = complex_eigvec(A, 1.0 / std::conj(lambda));
  cplx c = krein_form(v, w);
  if (std::abs(c) < 1e-10)
    throw numerical_error("normal_form: degenerate quadruplet pairing");
  w *= std::conj(cplx(0, 1) / c);
  CMat UA(4, 4);
  UA.col(0) = v;
  UA.col(1) = w;
  UA.col(2) = v.conjugate();
  UA.col(3) = w.conjugate();
  CMat Xc = UA * canonical_v_basis().adjoint();
  if (Xc.imag().cwiseAbs().maxCoeff() > 1e-8)
    throw numerical_error("normal_form: quadruplet basis lost realness");
  NormalForm nf;
  nf.X = Xc.real();
  nf.N = rep_quadruplet(lambda);
  auto rep = is_symplectic(nf.X, 1e-6);
  if (!rep.ok)
    throw numerical_error("normal_form: quadruplet basis is not symplectic");
  nf.residual = (A * nf.X - nf.X * nf.N).cwiseAbs().maxCoeff() /
                (1.0 + A.cwiseAbs().maxCoeff());
  return nf;
}

// B_U form via the beta-normalized Jordan pair.
NormalForm circle_jordan_form(const Mat& A, cplx lambda, char sign) {
  CircleJordanData jd = circle_jordan_data(A, lambda);
  double orient = (cplx(0, -1) * std::conj(lambda) * jd.mu0 * jd.d).real();
  if ((orient > 0 ? '+' : '-') != sign)
    throw numerical_error("normal_form: circle nilpotent sign mismatch");
  double beta0 = krein_form(jd.w0, jd.w0).real();
  CVec w1 = jd.w0 + (-beta0 / (2.0 * jd.d)) * jd.v;
  cplx z = cplx(0, -1) * jd.mu0 / (double(sign == '+' ? 1 : -1) * lambda * std::conj(jd.d));
  if (z.real() <= 0 || std::abs(z.imag()) > 1e-6 * z.real())
    throw numerical_error("normal_form: B_U normalization failed");
  double a = std::sqrt(z.real());
  cplx b = cplx(0, -1) / (a * std::conj(jd.d));
  CMat UA(4, 4);
  UA.col(0) = a * jd.v;
  UA.col(1) = b * w1;
  UA.col(2) = UA.col(0).conjugate();
  UA.col(3) = UA.col(1).conjugate();
  CMat Xc = UA * canonical_v_basis().adjoint();
  if (Xc.imag().cwiseAbs().maxCoeff() > 1e-7)
    throw numerical_error("normal_form: B_U basis lost realness");
  NormalForm nf;
  nf.X = Xc.real();
  nf.N = rep_circle_nilpotent(lambda, sign);
  auto rep = is_symplectic(nf.X, 1e-6);
  if (!rep.ok)
    throw numerical_error("normal_form: B_U basis is not symplectic");
  nf.residual = (A * nf.X - nf.X * nf.N).cwiseAbs().maxCoeff() /
                (1.0 + A.cwiseAbs().maxCoeff());
  return nf;
}

// B_R form: symplectic Jordan bases of the paired Lagrangian eigenspaces,
// matched to the canonical family member rep_real_double(lambda, 1).
struct LagrangianChain {
  Vec u, r;  // (A - lambda) r = u, (A - lambda) u = 0
};

LagrangianChain lagrangian_chain(const Mat& A, double lambda) {
  Mat basis = real_cluster_basis(A, lambda);
  Mat N = A - lambda * Mat::Identity(A.rows(), A.cols());
  Mat Nr = basis.transpose() * N * basis;
  Eigen::JacobiSVD<Mat> svd(Nr, Eigen::ComputeFullV);
  Vec rc = svd.matrixV().col(0);  // direction NOT in the kernel
  LagrangianChain ch;
  ch.r = basis * rc;
  ch.u = N * ch.r;
  if (ch.u.norm() < 1e-10)
    throw numerical_error("normal_form: B_R chain collapsed");
  return ch;
}

struct PairedChainData {
  LagrangianChain lo, hi;  // at lambda and 1/lambda
  double p, q;             // omega(u, r_hat), omega(r, r_hat)
};

PairedChainData paired_chains(const Mat& A, double lambda) {
  PairedChainData d;
  d.lo = lagrangian_chain(A, lambda);
  d.hi = lagrangian_chain(A, 1.0 / lambda);
  d.p = omega(d.lo.u, d.hi.r);
  d.q = omega(d.lo.r, d.hi.r);
  if (std::abs(d.p) < 1e-10)
    throw numerical_error("normal_form: B_R pairing degenerate");
  return d;
}

NormalForm real_jordan_form(const Mat& A, double lambda) {
  Mat N = rep_real_double(lambda, 1.0);
  PairedChainData da = paired_chains(A, lambda);
  PairedChainData dn = paired_chains(N, lambda);
  // scale freedom: u' = c u, r' = c r + d u (and hatted side by c_hat) matches
  // p then q; see the pairing relations omega(u, u_hat) = 0 and
  // lambda omega(r, u_hat) = -omega(u, r_hat)/lambda.
  double cch = dn.p / da.p;
  double c = std::sqrt(std::abs(cch));
  double ch = cch / c;
  double dd = (dn.q - cch * da.q) / (ch * da.p);
  Mat BA(4, 4), BN(4, 4);
  BA.col(0) = c * da.lo.u;
  BA.col(1) = c * da.lo.r + dd * da.lo.u;
  BA.col(2) = ch * da.hi.u;
  BA.col(3) = ch * da.hi.r;
  BN.col(0) = dn.lo.u;
  BN.col(1) = dn.lo.r;
  BN.col(2) = dn.hi.u;
  BN.col(3) = dn.hi.r;
  NormalForm nf;
  nf.X = BA * BN.inverse();
  auto rep = is_symplectic(nf.X, 1e-6);
  if (!rep.ok)
    throw numerical_error("normal_form: B_R basis is not symplectic (residual " +
                          std::to_string(rep.residual) + ")");
  nf.N = N;
  nf.residual = (A * nf.X - nf.X * nf.N).cwiseAbs().maxCoeff() /
                (1.0 + A.cwiseAbs().maxCoeff());
  return nf;
}

const EigenGroup* group_of_kind(const EigenStructure& es,
                                std::initializer_list<GroupKind> kinds) {
  for (const auto& g : es.groups)
    for (GroupKind k : kinds)
      if (g.kind == k) return &g;
  return nullptr;
}

}  // namespace

Mat rep_quadruplet(cplx lambda) {
  if (std::abs(lambda) <= 1.0 || lambda.imag() <= 0.0)
    throw dimension_error("rep_quadruplet: need |lambda| > 1 with Im > 0");
  CMat M(2, 2);
  M << lambda, 0.0, 0.0, 1.0 / std::conj(lambda);
  return from_v_block(M);
}

Mat rep_circle_nilpotent(cplx lambda, char sign) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12 || std::abs(lambda.imag()) < 1e-12)
    throw dimension_error("rep_circle_nilpotent: need a circle lambda != +-1");
  if (sign != '+' && sign != '-')
    throw dimension_error("rep_circle_nilpotent: sign must be '+' or '-'");
  cplx mu = (sign == '+') ? lambda : -lambda;
  CMat M(2, 2);
  M << lambda, mu, 0.0, lambda;
  return from_v_block(M);
}

Mat rep_real_double(double lambda, double alpha) {
  if (std::abs(lambda) <= 1.0)
    throw dimension_error("rep_real_double: need |lambda| > 1");
  Mat A = Mat::Zero(4, 4);
  A(0, 0) = lambda;
  A(0, 2) = alpha;
  A(1, 1) = 1.0 / lambda;
  A(2, 2) = lambda;
  A(3, 1) = -alpha / (lambda * lambda);
  A(3, 3) = 1.0 / lambda;
  return A;
}

char nilpotent_sign(const Mat& A, cplx lambda, double tol_circle) {
  detail::require_even(A, "nilpotent_sign");
  const int d = static_cast<int>(A.rows());
  if (d != 2 && d != 4) throw dimension_error("nilpotent_sign: only dims 2 and 4");
  bool is_real = std::abs(lambda.imag()) <= tol_circle * (1.0 + std::abs(lambda));
  if (is_real) {
    double l = lambda.real() >= 0 ? 1.0 : -1.0;
    if (std::abs(lambda.real() - l) > 1e-6)
      throw unsupported_error(
          "nilpotent_sign: real lambda != +-1 has a single conjugacy class");
    Mat basis = (d == 2) ? Mat::Identity(2, 2) : real_cluster_basis(A, l);
    return real_nilpotent_sign(A, l, basis);
  }
  cplx l = lambda / std::abs(lambda);
  return circle_nilpotent_sign(A, l);
}

StratumLabel classify(const Mat& A, double tol_circle) {
  detail::require_even(A, "classify");
  const int d = static_cast<int>(A.rows());
  if (d != 2 && d != 4) throw dimension_error("classify: only dims 2 and 4");
  EigenStructure es = eigen_structure(A, tol_circle);
  StratumLabel out;
  for (const auto& g : es.groups) out.labels.push_back(g.lambda);

  // A transit point inside the grouping tolerance can look like a double
  // eigenvalue without carrying a usable Jordan form (the form is tiny or
  // definite instead of rank one); treat that as the diagonalizable case.
  auto try_sign = [&](cplx lambda) -> std::optional<char> {
    try {
      return nilpotent_sign(A, lambda, tol_circle);
    } catch (const numerical_error&) {
      return std::nullopt;
    }
  };

  if (d == 2) {
    const EigenGroup& g = es.groups[0];
    switch (g.kind) {
      case GroupKind::CirclePair:
        out.region = (A(1, 0) > 0) ? Region::O_U_plus : Region::O_U_minus;
        return out;
      case GroupKind::RealPair:
        out.region = (g.lambda.real() > 0) ? Region::O_R_plus : Region::O_R_minus;
        return out;
      case GroupKind::PlusOne:
      case GroupKind::MinusOne:
        out.region = (g.kind == GroupKind::PlusOne) ? Region::AtPlusOne
                                                    : Region::AtMinusOne;
        if (!g.diagonalizable) out.nilpotent_sign = try_sign(g.lambda);
        return out;
      default:
        out.region = Region::NonGeneric;
        return out;
    }
  }

  // dim 4
  if (es.groups.size() == 1) {
    const EigenGroup& g = es.groups[0];
    switch (g.kind) {
      case GroupKind::Quadruplet:
        out.region = Region::O_C;
        return out;
      case GroupKind::CirclePair:
        if (g.mult == 2 && !g.diagonalizable)
          out.nilpotent_sign = try_sign(g.lambda);
        if (out.nilpotent_sign) {
          out.region = Region::B_U;
        } else if (g.mult == 2 && std::abs(*g.splitting) == 2) {
          out.region = Region::O_U;
        } else {
          out.region = Region::NonGeneric;
        }
        return out;
      case GroupKind::RealPair:
        if (g.mult == 2 && !g.diagonalizable)
          out.region = Region::B_R;
        else
          out.region = Region::NonGeneric;
        return out;
      case GroupKind::PlusOne:
        out.region = Region::AtPlusOne;
        return out;
      case GroupKind::MinusOne:
        out.region = Region::AtMinusOne;
        return out;
    }
  }

  if (es.groups.size() == 2) {
    const EigenGroup &g1 = es.groups[0], &g2 = es.groups[1];
    auto kinds = [&](GroupKind a, GroupKind b) {
      return (g1.kind == a && g2.kind == b) || (g1.kind == b && g2.kind == a);
    };
    if (kinds(GroupKind::CirclePair, GroupKind::CirclePair)) {
      out.region = Region::O_U;
      return out;
    }
    if (kinds(GroupKind::RealPair, GroupKind::RealPair)) {
      bool all_pos = g1.lambda.real() > 0 && g2.lambda.real() > 0;
      out.region = all_pos ? Region::O_R_plus : Region::O_R_minus;
      return out;
    }
    if (kinds(GroupKind::CirclePair, GroupKind::RealPair)) {
      out.region = Region::O_UR;
      return out;
    }
    const EigenGroup* pm = group_of_kind(es, {GroupKind::PlusOne, GroupKind::MinusOne});
    const EigenGroup* other = (pm == &g1) ? &g2 : &g1;
    if (pm && (other->kind == GroupKind::CirclePair ||
               other->kind == GroupKind::RealPair)) {
      if (!pm->diagonalizable) out.nilpotent_sign = try_sign(pm->lambda);
      if (out.nilpotent_sign) {
        out.region = (other->kind == GroupKind::CirclePair) ? Region::B_UR
                                                            : Region::B_RU;
      } else {
        out.region = Region::NonGeneric;
      }
      return out;
    }
    // {+1,+1,-1,-1}
    out.region = Region::NonGeneric;
    return out;
  }

  out.region = Region::NonGeneric;
  return out;
}

NormalForm normal_form(const Mat& A, double tol_circle) {
  detail::require_even(A, "normal_form");
  const int d = static_cast<int>(A.rows());
  if (d != 2 && d != 4) throw dimension_error("normal_form: only dims 2 and 4");
  EigenStructure es = eigen_structure(A, tol_circle);
  StratumLabel lab = classify(A, tol_circle);

  if (lab.region == Region::NonGeneric)
    throw unsupported_error("normal_form: NonGeneric stratum is not supported");

  std::vector<BlockForm> blocks;
  switch (lab.region) {
    case Region::O_U_plus:
    case Region::O_U_minus: {
      const EigenGroup& g = es.groups[0];
      int sp = *g.splitting;
      blocks.push_back(circle_block(A, g.lambda, sp));
      return assemble_blocks(A, std::move(blocks));
    }
    case Region::O_R_plus:
    case Region::O_R_minus: {
      for (const auto& g : es.groups) blocks.push_back(real_block(A, g.lambda.real()));
      return assemble_blocks(A, std::move(blocks));
    }
    case Region::AtPlusOne:
    case Region::AtMinusOne: {
      double l = (lab.region == Region::AtPlusOne) ? 1.0 : -1.0;
      if (d == 4) {
        if (A.isApprox(l * Mat::Identity(4, 4), 1e-9)) {
          NormalForm nf;
          nf.X = Mat::Identity(4, 4);
          nf.N = l * Mat::Identity(4, 4);
          return nf;
        }
        throw unsupported_error("normal_form: nilpotent structure at +-1 beyond the "
                                "2x2 factors is not supported");
      }
      if (!lab.nilpotent_sign) {
        NormalForm nf;
        nf.X = Mat::Identity(2, 2);
        nf.N = l * Mat::Identity(2, 2);
        return nf;
      }
      blocks.push_back(pm1_jordan_block(A, l, Mat::Identity(2, 2), *lab.nilpotent_sign));
      return assemble_blocks(A, std::move(blocks));
    }
    case Region::O_U: {
      if (es.groups.size() == 2) {
        for (const auto& g : es.groups)
          blocks.push_back(circle_block(A, g.lambda, *g.splitting));
        return assemble_blocks(A, std::move(blocks));
      }
      // multiplicity 2 with definite splitting: beta-orthogonal eigenbasis
      const EigenGroup& g = es.groups[0];
      CMat V = invariant_subspace(A, g.lambda, tol_circle);
      CMat J = standard_J(4).cast<cplx>();
      CMat G = cplx(0, -1) * V.adjoint() * J * V;
      G = 0.5 * (G + G.adjoint());
      Eigen::SelfAdjointEigenSolver<CMat> ges(G);
      for (int i = 0; i < 2; ++i) {
        CVec y = V * ges.eigenvectors().col(i);
        cplx b = krein_form(y, y);
        int sp = (b.real() > 0) ? 1 : -1;
        CVec v = fix_phase(y / std::sqrt(std::abs(b.real())));
        Vec a = v.real(), bb = v.imag();
        BlockForm f;
        f.sort_key = g.lambda + cplx(0, 1e-6 * i);  // stable order
        Mat cols(4, 2);
        if (sp > 0) {
          cols.col(0) = bb;
          cols.col(1) = a;
          f.rep = rep_rotation(std::arg(g.lambda));
        } else {
          cols.col(0) = -bb;
          cols.col(1) = a;
          f.rep = rep_rotation(2.0 * std::numbers::pi - std::arg(g.lambda));
        }
        double c = omega(Vec(cols.col(0)), Vec(cols.col(1)));
        if (c <= 0) throw numerical_error("normal_form: O_U double block degenerate");
        f.cols = cols / std::sqrt(c);
        blocks.push_back(f);
      }
      return assemble_blocks(A, std::move(blocks));
    }
    case Region::O_UR: {
      for (const auto& g : es.groups) {
        if (g.kind == GroupKind::CirclePair)
          blocks.push_back(circle_block(A, g.lambda, *g.splitting));
        else
          blocks.push_back(real_block(A, g.lambda.real()));
      }
      return assemble_blocks(A, std::move(blocks));
    }
    case Region::O_C:
      return quadruplet_form(A, es.groups[0].lambda);
    case Region::B_U:
      return circle_jordan_form(A, es.groups[0].lambda, *lab.nilpotent_sign);
    case Region::B_R:
      return real_jordan_form(A, es.groups[0].lambda.real());
    case Region::B_UR:
    case Region::B_RU: {
      const EigenGroup* pm =
          group_of_kind(es, {GroupKind::PlusOne, GroupKind::MinusOne});
      const EigenGroup* other = (&es.groups[0] == pm) ? &es.groups[1] : &es.groups[0];
      double l = pm->lambda.real();
      blocks.push_back(
          pm1_jordan_block(A, l, real_cluster_basis(A, l), *lab.nilpotent_sign));
      if (other->kind == GroupKind::CirclePair)
        blocks.push_back(circle_block(A, other->lambda, *other->splitting));
      else
        blocks.push_back(real_block(A, other->lambda.real()));
      return assemble_blocks(A, std::move(blocks));
    }
    default:
      throw unsupported_error("normal_form: unsupported stratum");
  }
}

}  // namespace sympos
