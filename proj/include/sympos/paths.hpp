#pragma once

#include "sympos/strata.hpp"

#include <vector>

namespace sympos {

struct Segment {
  double duration = 0.0;
  Mat P;
};

// Piecewise-autonomous positive path: value(t) is the left-ordered product of
// segment exponentials applied to the origin. Immutable after construction.
class PositivePath {
 public:
  PositivePath() = default;
  PositivePath(Mat origin, std::vector<Segment> segments);

  int dim() const { return static_cast<int>(origin_.rows()); }
  double duration() const { return total_; }
  const Mat& origin() const { return origin_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const Mat& endpoint() const { return prefix_.back(); }

  Mat evaluate(double t) const;

  // Generator at time t; at segment junctions returns the incoming segment's
  // generator and sets *corner.
  Mat generator_at(double t, bool* corner = nullptr) const;

 private:
  Mat origin_;
  std::vector<Segment> segments_;
  std::vector<Mat> prefix_;  // prefix_[k] = value after k segments
  std::vector<double> cut_;  // cumulative durations, cut_[0] = 0
  double total_ = 0.0;
};

struct PositivityReport {
  bool positive = false;
  double margin = 0.0;  // min over segments of lambda_min(P)
};
PositivityReport verify_positive(const PositivePath& path);

// Values X^{-1} A_t X; generators X^T P X.
PositivePath conjugate_path(const PositivePath& path, const Mat& X);

// Concatenation; each origin must match the previous endpoint within 1e-8 and
// is re-based exactly. blend_width > 0 replaces a neighborhood of each corner
// with a segment averaging the adjacent generators.
PositivePath smooth_concat(const std::vector<PositivePath>& pieces,
                           double blend_width = 0.0);

struct ItineraryInterval {
  double t0 = 0.0;
  double t1 = 0.0;
  StratumLabel label;
};

struct BoundaryCrossing {
  double t = 0.0;
  Region from = Region::NonGeneric;
  Region to = Region::NonGeneric;
  Region boundary = Region::NonGeneric;
  std::optional<char> sign;   // nilpotent flavor at the crossing, when defined
  cplx where;                 // eigenvalue label at the crossing
};

struct TrajectorySample {
  double t = 0.0;
  EigenStructure es;
  // track ids aligned with es.groups (stable across samples)
  std::vector<int> track;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<ItineraryInterval> itinerary;       // dims 2 and 4 only
  std::vector<BoundaryCrossing> crossings;        // dims 2 and 4 only
  double max_symp_residual = 0.0;
  int tracks = 0;
};

// Samples the path, tracks eigenvalue groups with adaptive refinement near
// group-type changes, and (dims 2,4) produces the stratum itinerary with
// refined boundary crossings.
Trajectory eigen_trajectory(const PositivePath& path, int samples = 512,
                            double tol_circle = kCircleTol);

// Legality audit for positive paths: circle departures must cross through
// nilpotent flavor '-', returns through '+'; B_R may be crossed both ways.
struct AuditReport {
  bool legal = true;
  std::string violation;
};
AuditReport audit_itinerary(const Trajectory& traj);

struct CzReport {
  int index = 0;
  double eps = 0.0;                        // final perturbation scale
  std::vector<double> crossing_times;
  bool tangency = false;                   // some crossing had no sign change
};

// Conley-Zehnder count for a path from the identity: crossings of
// det(A - Id) = 0 for t > 0, each with multiplicity dim ker(A - Id), after a
// small rotational perturbation exp(eps t J) A_t; eps is halved until the
// count stabilizes.
CzReport conley_zehnder_index(const PositivePath& path, int samples = 2048);

// True iff the path starts at the identity and never returns to the
// eigenvalue-1 variety for t > 0 (and its CZ count is 0).
bool is_short(const PositivePath& path, int samples = 2048);

// e_A(s): completed excursions into {O_C, O_R_plus, O_R_minus} that return to
// a circle-only stratum within (0, s].
int excursions(const PositivePath& path, double s, int samples = 512);

struct PathDiagnostics {
  PositivityReport positivity;
  double max_symp_residual = 0.0;
  bool short_path = false;
  CzReport cz;
  int excursions_full = 0;     // e_A(duration)
  AuditReport audit;
};
PathDiagnostics diagnose(const PositivePath& path, int samples = 512);

}  // namespace sympos
