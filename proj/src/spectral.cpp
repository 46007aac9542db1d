#include "sympos/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace sympos {

const char* to_string(GroupKind k) {
  switch (k) {
    case GroupKind::CirclePair: return "CirclePair";
    case GroupKind::RealPair: return "RealPair";
    case GroupKind::Quadruplet: return "Quadruplet";
    case GroupKind::PlusOne: return "PlusOne";
    case GroupKind::MinusOne: return "MinusOne";
  }
  return "?";
}

int EigenGroup::orbit_size() const {
  switch (kind) {
    case GroupKind::CirclePair:
    case GroupKind::RealPair: return 2 * mult;
    case GroupKind::Quadruplet: return 4 * mult;
    case GroupKind::PlusOne:
    case GroupKind::MinusOne: return mult;
  }
  return 0;
}

const EigenGroup* EigenStructure::find(cplx lambda, double tol) const {
  for (const auto& g : groups) {
    cplx orbit[4] = {g.lambda, std::conj(g.lambda), 1.0 / g.lambda,
                     std::conj(1.0 / g.lambda)};
    for (const cplx& o : orbit)
      if (std::abs(o - lambda) <= tol * (1.0 + std::abs(o))) return &g;
  }
  return nullptr;
}

cplx krein_form(const CVec& v, const CVec& w) {
  if (v.size() != w.size())
    throw dimension_error("krein_form: mismatched vector sizes");
  CMat J = standard_J(static_cast<int>(v.size())).cast<cplx>();
  return cplx(0, -1) * (w.conjugate().transpose() * (J * v))(0);
}

namespace {

constexpr double kPmBandFactor = 1e-9;

struct Snapped {
  cplx lambda;
  bool circle = false;
  bool real = false;
};

// Snap an eigenvalue: to the circle if |.|-1 is within tol, to the reals if
// Im is within tol, to +-1 if both.
Snapped snap_lambda(cplx l, double tol_circle) {
  Snapped s;
  double r = std::abs(l);
  bool near_circle = std::abs(r - 1.0) <= tol_circle * (1.0 + r);
  bool near_real = std::abs(l.imag()) <= tol_circle * (1.0 + r);
  if (near_circle && near_real) {
    s.lambda = (l.real() >= 0) ? 1.0 : -1.0;
    s.circle = s.real = true;
  } else if (near_circle) {
    s.lambda = l / r;
    s.circle = true;
  } else if (near_real) {
    s.lambda = cplx(l.real(), 0.0);
    s.real = true;
  } else {
    s.lambda = l;
  }
  return s;
}

cplx orbit_rep(cplx l) {
  if (std::abs(l) < 1.0) l = 1.0 / l;
  if (l.imag() < 0.0) l = std::conj(l);
  return l;
}

int rank_deficiency(const CMat& M, double tol) {
  Eigen::JacobiSVD<CMat> svd(M);
  const auto& s = svd.singularValues();
  double scale = s.size() ? s(0) : 0.0;
  int def = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) <= tol * (1.0 + scale)) ++def;
  return def;
}

CMat null_space(const CMat& M, int want) {
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(want);
}

CMat power_shift(const Mat& A, cplx lambda, int m) {
  const int d = static_cast<int>(A.rows());
  CMat B = A.cast<cplx>() - lambda * CMat::Identity(d, d);
  CMat M = B;
  for (int i = 1; i < m; ++i) M = M * B;
  return M;
}

int gram_signature(const Mat& A, const CMat& basis) {
  CMat J = standard_J(static_cast<int>(A.rows())).cast<cplx>();
  CMat G = cplx(0, -1) * basis.adjoint() * J * basis;
  G = 0.5 * (G + G.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(G);
  int sig = 0;
  double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double ev = es.eigenvalues()(i);
    if (std::abs(ev) <= 1e-8 * std::max(1.0, scale))
      throw numerical_error("splitting_number: Krein form nearly degenerate on the "
                            "invariant subspace");
    sig += (ev > 0) ? 1 : -1;
  }
  return sig;
}

// Signature of the Krein form on ker (A - lambda)^m, without going back
// through eigen_structure.
int splitting_raw(const Mat& A, cplx lambda, int m) {
  return gram_signature(A, null_space(power_shift(A, lambda, m), m));
}

bool group_diagonalizable(const Mat& A, cplx lambda, int mult) {
  if (mult <= 1) return true;
  return rank_deficiency(power_shift(A, lambda, 1), 1e-6) >= mult;
}

EigenGroup make_circle_group(const Mat& A, cplx lambda, int mult) {
  EigenGroup g;
  g.lambda = lambda;
  g.kind = GroupKind::CirclePair;
  g.mult = mult;
  g.diagonalizable = group_diagonalizable(A, lambda, mult);
  g.splitting = splitting_raw(A, lambda, mult);
  return g;
}

EigenGroup make_pm1_group(const Mat& A, double sign, int mult) {
  EigenGroup g;
  g.lambda = sign;
  g.kind = sign > 0 ? GroupKind::PlusOne : GroupKind::MinusOne;
  g.mult = mult;
  g.diagonalizable = group_diagonalizable(A, sign, mult);
  g.splitting = 0;
  return g;
}

EigenGroup make_real_group(const Mat& A, double lambda, int mult) {
  EigenGroup g;
  if (std::abs(lambda) < 1.0) lambda = 1.0 / lambda;
  g.lambda = lambda;
  g.kind = GroupKind::RealPair;
  g.mult = mult;
  g.diagonalizable = group_diagonalizable(A, lambda, mult);
  return g;
}

// Roots of lambda^2 - t lambda + 1 = 0 for real |t| < 2: the circle pair at
// angle theta with 2 cos(theta) = t.
cplx circle_from_t(double t) {
  double c = 0.5 * t;
  return {c, std::sqrt(std::max(0.0, 1.0 - c * c))};
}

double real_from_t(double t) {
  double h = 0.5 * std::abs(t);
  double l = h + std::sqrt(std::max(0.0, h * h - 1.0));
  return t >= 0 ? l : -l;
}

// Eigengroups of a 4x4 symplectic matrix via the palindromic reduction:
// char poly = lambda^4 - s1 lambda^3 + s2 lambda^2 - s1 lambda + 1, and with
// t = lambda + 1/lambda the quadratic q(t) = t^2 - s1 t + (s2 - 2).
std::vector<EigenGroup> groups_dim4(const Mat& A, double tol_circle) {
  const double s1 = A.trace();
  const double s2 = 0.5 * (s1 * s1 - (A * A).trace());
  // det(A -+ I) = q(+-2); the trace form is conditioned by the spectrum, not
  // by the entry size, so the +-1 band can stay narrow for skewed frames
  const double band_pm = 10.0 * kPmBandFactor * (1.0 + std::abs(s1) + std::abs(s2));
  const double gp = 2.0 - 2.0 * s1 + s2;
  const double gm = 2.0 + 2.0 * s1 + s2;

  // A t-root at +-2 means eigenvalues at +-1; q'(+-2) = 4 -+ s1 tells a
  // simple t-root (pair) from a double one (all four).
  int mult_p = 0, mult_m = 0;
  if (std::abs(gp) <= band_pm)
    mult_p = (std::abs(4.0 - s1) <= 1e-6 * (1.0 + std::abs(s1))) ? 4 : 2;
  if (std::abs(gm) <= band_pm)
    mult_m = (std::abs(4.0 + s1) <= 1e-6 * (1.0 + std::abs(s1))) ? 4 : 2;

  std::vector<EigenGroup> out;
  if (mult_p == 4 || mult_m == 4) {
    out.push_back(make_pm1_group(A, mult_p == 4 ? 1.0 : -1.0, 4));
    return out;
  }
  if (mult_p == 2 && mult_m == 2) {
    out.push_back(make_pm1_group(A, 1.0, 2));
    out.push_back(make_pm1_group(A, -1.0, 2));
    return out;
  }
  if (mult_p == 2 || mult_m == 2) {
    double sign = mult_p ? 1.0 : -1.0;
    out.push_back(make_pm1_group(A, sign, 2));
    // Root sum of q is s1, so the remaining simple t-root is exact.
    double t2 = s1 - 2.0 * sign;
    if (std::abs(t2) < 2.0)
      out.push_back(make_circle_group(A, circle_from_t(t2), 1));
    else
      out.push_back(make_real_group(A, real_from_t(t2), 1));
    return out;
  }

  const double delta = s1 * s1 / 4.0 - (s2 - 2.0);  // t-root discriminant
  const double band_t = 1e-7 * (1.0 + s1 * s1);
  if (delta < -band_t) {
    cplx t(0.5 * s1, std::sqrt(-delta));
    cplx root = std::sqrt(t * t - 4.0);
    cplx l = 0.5 * (t + root);
    if (std::abs(l) < 1.0) l = 0.5 * (t - root);
    EigenGroup g;
    g.lambda = orbit_rep(l);
    g.kind = GroupKind::Quadruplet;
    g.mult = 1;
    g.diagonalizable = true;
    out.push_back(g);
    return out;
  }
  if (delta <= band_t) {
    double t0 = 0.5 * s1;
    if (std::abs(t0) < 2.0)
      out.push_back(make_circle_group(A, circle_from_t(t0), 2));
    else
      out.push_back(make_real_group(A, real_from_t(t0), 2));
    return out;
  }
  double r = std::sqrt(delta);
  for (double t : {0.5 * s1 - r, 0.5 * s1 + r}) {
    if (std::abs(t) < 2.0)
      out.push_back(make_circle_group(A, circle_from_t(t), 1));
    else
      out.push_back(make_real_group(A, real_from_t(t), 1));
  }
  return out;
}

std::vector<EigenGroup> groups_dim2(const Mat& A, double tol_circle) {
  (void)tol_circle;
  const double t = A.trace();
  const double scale = 1.0 + A.cwiseAbs().maxCoeff();
  const double band_pm = kPmBandFactor * scale * scale;
  std::vector<EigenGroup> out;
  if (std::abs(2.0 - t) <= band_pm) {
    out.push_back(make_pm1_group(A, 1.0, 2));
  } else if (std::abs(2.0 + t) <= band_pm) {
    out.push_back(make_pm1_group(A, -1.0, 2));
  } else if (std::abs(t) < 2.0) {
    out.push_back(make_circle_group(A, circle_from_t(t), 1));
  } else {
    out.push_back(make_real_group(A, real_from_t(t), 1));
  }
  return out;
}

std::vector<EigenGroup> groups_general(const Mat& A, double tol_circle) {
  Eigen::EigenSolver<Mat> es(A);
  if (es.info() != Eigen::Success)
    throw numerical_error("eigen_structure: dense eigensolver failed");
  std::vector<cplx> reps;
  std::vector<int> counts;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    Snapped s = snap_lambda(es.eigenvalues()(i), tol_circle);
    cplx rep = orbit_rep(s.lambda);
    bool merged = false;
    for (size_t k = 0; k < reps.size(); ++k) {
      if (std::abs(reps[k] - rep) <= 1e-6 * (1.0 + std::abs(rep))) {
        counts[k]++;
        merged = true;
        break;
      }
    }
    if (!merged) {
      reps.push_back(rep);
      counts.push_back(1);
    }
  }
  std::vector<EigenGroup> out;
  for (size_t k = 0; k < reps.size(); ++k) {
    Snapped s = snap_lambda(reps[k], tol_circle);
    if (s.circle && s.real)
      out.push_back(make_pm1_group(A, s.lambda.real(), counts[k]));
    else if (s.circle)
      out.push_back(make_circle_group(A, s.lambda, counts[k] / 2));
    else if (s.real)
      out.push_back(make_real_group(A, s.lambda.real(), counts[k] / 2));
    else {
      EigenGroup g;
      g.lambda = s.lambda;
      g.kind = GroupKind::Quadruplet;
      g.mult = counts[k] / 4;
      g.diagonalizable = group_diagonalizable(A, s.lambda, g.mult);
      out.push_back(g);
    }
  }
  return out;
}

}  // namespace

EigenStructure eigen_structure(const Mat& A, double tol_circle) {
  detail::require_even(A, "eigen_structure");
  auto rep = is_symplectic(A, 1e-6);
  if (!rep.ok)
    throw numerical_error("eigen_structure: input is not symplectic (residual " +
                          std::to_string(rep.residual) + ")");
  EigenStructure es;
  es.dim = static_cast<int>(A.rows());
  if (es.dim == 2)
    es.groups = groups_dim2(A, tol_circle);
  else if (es.dim == 4)
    es.groups = groups_dim4(A, tol_circle);
  else
    es.groups = groups_general(A, tol_circle);

  std::sort(es.groups.begin(), es.groups.end(),
            [](const EigenGroup& a, const EigenGroup& b) {
              if (a.lambda.real() != b.lambda.real())
                return a.lambda.real() < b.lambda.real();
              return a.lambda.imag() < b.lambda.imag();
            });

  const int d = es.dim;
  for (const auto& g : es.groups) {
    Eigen::JacobiSVD<CMat> svd(power_shift(A, g.lambda, 1));
    double smin = svd.singularValues()(d - 1);
    es.residual = std::max(es.residual, smin / (1.0 + A.cwiseAbs().maxCoeff()));
  }
  return es;
}

CMat invariant_subspace(const Mat& A, cplx lambda, double tol_circle) {
  detail::require_even(A, "invariant_subspace");
  EigenStructure es = eigen_structure(A, tol_circle);
  const EigenGroup* g = es.find(lambda);
  if (!g)
    throw numerical_error("invariant_subspace: lambda is not in the spectrum");
  // Use the snapped orbit member closest to the request.
  cplx orbit[4] = {g->lambda, std::conj(g->lambda), 1.0 / g->lambda,
                   std::conj(1.0 / g->lambda)};
  cplx l = orbit[0];
  for (const cplx& o : orbit)
    if (std::abs(o - lambda) < std::abs(l - lambda)) l = o;
  return null_space(power_shift(A, l, g->mult), g->mult);
}

int splitting_number(const Mat& A, cplx lambda, double tol_circle) {
  EigenStructure es = eigen_structure(A, tol_circle);
  const EigenGroup* g = es.find(lambda);
  if (!g)
    throw numerical_error("splitting_number: lambda is not in the spectrum");
  if (!g->on_circle() || !g->splitting)
    throw numerical_error("splitting_number: lambda must lie on the unit circle");
  // sigma(conj(lambda)) = -sigma(lambda).
  bool conj_side = std::abs(std::conj(g->lambda) - lambda) <
                   std::abs(g->lambda - lambda);
  return conj_side ? -*g->splitting : *g->splitting;
}

double krein_velocity(const Mat& A, const Mat& P, cplx lambda, double tol_circle) {
  detail::require_symmetric(P, "krein_velocity");
  if (P.rows() != A.rows())
    throw dimension_error("krein_velocity: P must match A's dimension");
  EigenStructure es = eigen_structure(A, tol_circle);
  const EigenGroup* g = es.find(lambda);
  if (!g)
    throw numerical_error("krein_velocity: lambda is not in the spectrum");
  if (g->mult != 1 || g->kind != GroupKind::CirclePair)
    throw numerical_error("krein_velocity: lambda must be a simple circle eigenvalue");
  cplx l = (std::abs(g->lambda - lambda) <= std::abs(std::conj(g->lambda) - lambda))
               ? g->lambda
               : std::conj(g->lambda);
  CVec x0 = null_space(power_shift(A, l, 1), 1).col(0);
  double num = (x0.conjugate().transpose() * P.cast<cplx>() * x0)(0).real();
  cplx beta = krein_form(x0, x0);
  if (std::abs(beta) < 1e-12)
    throw numerical_error("krein_velocity: Krein form vanishes on the eigenvector");
  return num / beta.real();
}

}  // namespace sympos
