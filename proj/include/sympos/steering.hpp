#pragma once

#include "sympos/paths.hpp"

namespace sympos {

enum class LegKind { Rotate, Slide, CrossN, CrossB_R, Cap, Correction };

const char* to_string(LegKind k);

struct RouteLeg {
  LegKind kind = LegKind::Rotate;
  std::string detail;
  double t0 = 0.0;  // location inside the assembled path
  double t1 = 0.0;
};

// A constructed positive path together with the plan that produced it.
struct Route {
  std::vector<RouteLeg> legs;
  PositivePath path;
  double endpoint_residual = 0.0;
  double margin = 0.0;
};

// One-segment rotation block path rho(theta_from) -> rho(theta_to),
// theta_to > theta_from.
PositivePath rotate_block(double theta_from, double theta_to);

// 2x2 path from diag(lambda_from, 1/lambda_from) sliding the eigenvalue
// monotonically to lambda_to (same component of the reals off [-1,1], or the
// reciprocal component). Endpoint eigenvalue within 1e-7 of lambda_to.
PositivePath real_slide(double lambda_from, double lambda_to);

// Certified transversal boundary crossing at the canonical representative.
// lambda = +-1 gives the 2x2 crossing at the n=1 nilpotent classes; a circle
// lambda != +-1 gives the 4x4 crossing through B_U. Positive paths can only
// exit the circle region through flavor '-' and enter through '+'; asking for
// the wrong flavor throws infeasible_error.
enum class CrossDir { Exit, Enter };
PositivePath exit_enter_via_N(cplx lambda, CrossDir dir, double tau = 0.15);

// Positive path from A to B (dims 2 and 4). Throws infeasible_error only on
// unsupported (NonGeneric) strata.
Route connect(const Mat& A, const Mat& B);

// Short positive path from the identity to B; requires B off the eigenvalue-1
// variety and an even count of real eigenvalues > 1 (with multiplicity),
// otherwise throws infeasible_error naming the parity rule.
Route short_path_to(const Mat& B);

// Extends a short positive path, keeping it short and positive, so that the
// endpoint lies in the circle-only open stratum.
Route extend_to_U(const PositivePath& path);

}  // namespace sympos
