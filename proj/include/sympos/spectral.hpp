#pragma once

#include "sympos/core.hpp"

#include <optional>
#include <vector>

namespace sympos {

enum class GroupKind { CirclePair, RealPair, Quadruplet, PlusOne, MinusOne };

const char* to_string(GroupKind k);

// One symmetry orbit of eigenvalues, keyed by the representative with
// |lambda| >= 1 and Im lambda >= 0.
struct EigenGroup {
  cplx lambda;
  GroupKind kind = GroupKind::PlusOne;
  int mult = 0;  // algebraic multiplicity of lambda itself
  bool diagonalizable = true;
  std::optional<int> splitting;  // circle groups only; 0 at +-1

  bool on_circle() const {
    return kind == GroupKind::CirclePair || kind == GroupKind::PlusOne ||
           kind == GroupKind::MinusOne;
  }
  // Number of eigenvalues (with multiplicity) in the whole orbit.
  int orbit_size() const;
};

struct EigenStructure {
  int dim = 0;
  std::vector<EigenGroup> groups;
  double residual = 0.0;  // max eigenpair backward error

  const EigenGroup* find(cplx lambda, double tol = 1e-6) const;
};

inline constexpr double kCircleTol = 1e-8;

// Spectrum of a symplectic matrix grouped into symmetry orbits.
// Dims 2 and 4 go through the palindromic reduction t = lambda + 1/lambda;
// larger dims use a dense solver. Eigenvalues are snapped: |lambda| within
// tol_circle of 1 goes to the circle, Im within tol of 0 goes to the reals,
// ties snap to +-1.
EigenStructure eigen_structure(const Mat& A, double tol_circle = kCircleTol);

// Krein form beta(v, w) = -i omega(v, conj(w)) = -i conj(w)^T J v.
// Hermitian; linear in v, conjugate-linear in w.
cplx krein_form(const CVec& v, const CVec& w);

// Orthonormal basis (columns) of the generalized eigenspace ker (A-lambda)^m.
CMat invariant_subspace(const Mat& A, cplx lambda, double tol_circle = kCircleTol);

// Signature of the Krein form on the invariant subspace of a circle
// eigenvalue. Throws numerical_error if the restricted form is nearly
// degenerate relative to the basis scale.
int splitting_number(const Mat& A, cplx lambda, double tol_circle = kCircleTol);

// Angular velocity d(theta)/dt = <P x0, x0> / beta(x0, x0) of a simple circle
// eigenvalue e^{i theta} under the flow t -> exp(tJP) A.
double krein_velocity(const Mat& A, const Mat& P, cplx lambda,
                      double tol_circle = kCircleTol);

}  // namespace sympos
