#pragma once

#include "sympos/paths.hpp"

namespace sympos {

// Periodic quadratic Hamiltonian system: piecewise-constant positive definite
// generator schedule over one period (durations sum to 1).
struct PeriodicSystem {
  std::vector<Segment> segments;

  PeriodicSystem() = default;
  explicit PeriodicSystem(std::vector<Segment> segs);
  int dim() const { return segments.empty() ? 0 : static_cast<int>(segments[0].P.rows()); }
};

// Time-ordered monodromy of the scaled system x' = mu J P(t) x.
Mat monodromy(const PeriodicSystem& sys, double mu);

// Spectral stability: all eigenvalues on the unit circle and every circle
// group diagonalizable (power-bounded).
bool is_stable(const Mat& A, double tol_circle = kCircleTol);

// Krein strong stability: spectrum on the circle away from +-1 and every
// group definite (|splitting| equals multiplicity).
bool is_strongly_stable(const Mat& A, double tol_circle = kCircleTol);

// Smallest mu > 0 with det(monodromy(mu) + Id) = 0: the first parameter where
// an eigenvalue reaches -1. Scans mu_max/1000 steps, then refines crossings to
// 1e-9 relative; even-order touches are caught by a minimum-magnitude pass.
// Requires every segment generator positive definite. Returns mu_max if no
// crossing is found.
double critical_mu(const PeriodicSystem& sys, double mu_max = 10.0);

struct ExcursionReport {
  int excursions = 0;      // e_A(1)
  int index = 0;           // i_A(1)
  bool short_path = false;
  bool stable_endpoint = false;
  bool ok_short_bound = true;   // short stable => e <= 1
  bool ok_index_bound = true;   // e <= i + 1
};

ExcursionReport excursion_index_check(const PositivePath& path);

}  // namespace sympos
