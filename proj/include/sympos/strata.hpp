#pragma once

#include "sympos/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sympos {

enum class Region {
  O_U_plus,   // n=1: circle spectrum, lower-left entry > 0
  O_U_minus,  // n=1: circle spectrum, lower-left entry < 0
  O_U,        // n=2: all eigenvalues on the circle, away from +-1
  O_C,        // n=2: off-circle quadruplet
  O_R_plus,   // real spectrum, all eigenvalues positive
  O_R_minus,  // real spectrum with a negative pair
  O_UR,       // n=2: one circle pair, one real pair
  B_U,        // n=2: non-diagonalizable double circle pair
  B_R,        // n=2: non-diagonalizable double real pair
  B_UR,       // n=2: non-diagonalizable +-1 pair next to a circle pair
  B_RU,       // n=2: non-diagonalizable +-1 pair next to a real pair
  AtPlusOne,  // all eigenvalues at +1
  AtMinusOne, // all eigenvalues at -1
  NonGeneric  // codimension >= 2 (diagonalizable doubles with zero splitting, etc.)
};

const char* to_string(Region r);
std::optional<Region> region_from_string(const std::string& s);

struct StratumLabel {
  Region region = Region::NonGeneric;
  std::optional<char> nilpotent_sign;     // '+' or '-'
  std::vector<cplx> labels;               // stratum coordinates (eigenvalue labels)

  bool open_stratum() const {
    return region == Region::O_U_plus || region == Region::O_U_minus ||
           region == Region::O_U || region == Region::O_C ||
           region == Region::O_R_plus || region == Region::O_R_minus ||
           region == Region::O_UR;
  }
  bool off_circle() const {
    return region == Region::O_C || region == Region::O_R_plus ||
           region == Region::O_R_minus;
  }
};

// Conjugacy stratum of a symplectic matrix, dims 2 and 4 only.
StratumLabel classify(const Mat& A, double tol_circle = kCircleTol);

// Symmetric functions: n=2 gives (tr A, sigma_2, disc) with
// sigma_2 = ((tr A)^2 - tr A^2)/2 and disc = sigma_2 - sigma_1^2/4 - 2,
// which is 0 exactly on the double-real-pair boundary, positive on the
// quadruplet side. n=1 gives (tr A, 0, tr^2 - 4).
struct SymFuncs {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double disc = 0.0;
};
SymFuncs sym_funcs(const Mat& A);

// Sign distinguishing the two non-diagonalizable classes when lambda has
// multiplicity 2 (or the +-1 classes of a 2x2 block). Real lambda: sign of
// lambda * omega(v, Nv) as a semidefinite form on the eigenspace, so that
// [[-1,0],[-1,-1]] maps to '+'. Circle lambda: sign of Re(conj(lambda) mu)
// in the normalized form Av = lambda v, Aw = lambda w + mu v with
// beta(v,v) = beta(w,w) = 0, beta(v,w) = i.
char nilpotent_sign(const Mat& A, cplx lambda, double tol_circle = kCircleTol);

// Symplectic X and canonical representative N with X^{-1} A X = N.
// Supported for the generic and codimension-1 strata above; NonGeneric and
// nilpotent structure at +-1 beyond the 2x2 factors throw unsupported_error.
struct NormalForm {
  Mat X;
  Mat N;
  double residual = 0.0;  // ||X N - A X|| relative
};
NormalForm normal_form(const Mat& A, double tol_circle = kCircleTol);

// Canonical representative builders (used by normal_form and the steering
// module). All return matrices in the standard interleaved coordinates.
Mat rep_rotation(double theta);                       // 2x2 rho(theta)
Mat rep_real(double lambda);                          // 2x2 diag(lambda, 1/lambda)
Mat rep_nilpotent_pm1(double lambda, char sign);      // 2x2 classes at +-1
Mat rep_quadruplet(cplx lambda);                      // 4x4 O_C class B(V,lambda)
Mat rep_circle_nilpotent(cplx lambda, char sign);     // 4x4 B_U class N_lambda^{sign}
Mat rep_real_double(double lambda, double alpha);     // 4x4 B_R family A(lambda, alpha)
Mat blk(const Mat& B1, const Mat& B2);                // interleaved direct sum

}  // namespace sympos
