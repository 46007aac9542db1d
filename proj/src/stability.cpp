#include "sympos/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace sympos {

PeriodicSystem::PeriodicSystem(std::vector<Segment> segs) : segments(std::move(segs)) {
  if (segments.empty())
    throw dimension_error("PeriodicSystem: needs at least one segment");
  const auto rows = segments[0].P.rows();
  double total = 0.0;
  for (const auto& s : segments) {
    detail::require_even(s.P, "PeriodicSystem");
    detail::require_symmetric(s.P, "PeriodicSystem", 1e-9);
    if (s.P.rows() != rows)
      throw dimension_error("PeriodicSystem: segments must share one dimension");
    if (!(s.duration >= 0))
      throw dimension_error("PeriodicSystem: durations must be nonnegative");
    total += s.duration;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw dimension_error("PeriodicSystem: durations must sum to one period");
}

Mat monodromy(const PeriodicSystem& sys, double mu) {
  if (sys.segments.empty()) throw dimension_error("monodromy: empty system");
  const int d = sys.dim();
  Mat M = Mat::Identity(d, d);
  for (const auto& s : sys.segments)
    if (s.duration > 0) M = symp_exp(s.P, mu * s.duration) * M;
  return M;
}

bool is_stable(const Mat& A, double tol_circle) {
  EigenStructure es = eigen_structure(A, tol_circle);
  for (const auto& g : es.groups)
    if (!g.on_circle() || !g.diagonalizable) return false;
  return true;
}

bool is_strongly_stable(const Mat& A, double tol_circle) {
  EigenStructure es = eigen_structure(A, tol_circle);
  for (const auto& g : es.groups) {
    if (g.kind != GroupKind::CirclePair) return false;
    if (!g.splitting || std::abs(*g.splitting) != g.mult) return false;
  }
  return true;
}

namespace {

double det_at_minus_one(const PeriodicSystem& sys, double mu) {
  Mat M = monodromy(sys, mu);
  const int d = static_cast<int>(M.rows());
  double scale = std::pow(1.0 + M.cwiseAbs().maxCoeff(), d);
  return (M + Mat::Identity(d, d)).determinant() / scale;
}

double refine_sign_change(const PeriodicSystem& sys, double lo, double hi,
                          double flo) {
  for (int it = 0; it < 200 && hi - lo > 1e-9 * std::max(1.0, lo); ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = det_at_minus_one(sys, mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0))
      lo = mid, flo = fm;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// golden-section minimum of |f| for even-order touches
double refine_touch(const PeriodicSystem& sys, double lo, double hi,
                    double* fmin_out) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = std::abs(det_at_minus_one(sys, x1));
  double f2 = std::abs(det_at_minus_one(sys, x2));
  for (int it = 0; it < 200 && b - a > 1e-10 * std::max(1.0, a); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = std::abs(det_at_minus_one(sys, x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = std::abs(det_at_minus_one(sys, x2));
    }
  }
  double x = 0.5 * (a + b);
  *fmin_out = std::abs(det_at_minus_one(sys, x));
  return x;
}

}  // namespace

double critical_mu(const PeriodicSystem& sys, double mu_max) {
  if (sys.segments.empty()) throw dimension_error("critical_mu: empty system");
  if (!(mu_max > 0)) throw dimension_error("critical_mu: mu_max must be positive");
  for (const auto& s : sys.segments) {
    if (s.duration <= 0) continue;
    double lam = Eigen::SelfAdjointEigenSolver<Mat>(s.P).eigenvalues().minCoeff();
    if (lam <= 0)
      throw dimension_error("critical_mu: generators must be positive definite");
  }
  const int steps = 1000;
  const double h = mu_max / steps;
  std::vector<double> f(steps + 1);
  for (int k = 0; k <= steps; ++k) f[k] = det_at_minus_one(sys, k * h);

  double best = mu_max;
  for (int k = 1; k <= steps; ++k) {
    if (f[k] == 0.0) {
      best = std::min(best, k * h);
      break;
    }
    if ((f[k - 1] > 0) != (f[k] > 0)) {
      best = std::min(best, refine_sign_change(sys, (k - 1) * h, k * h, f[k - 1]));
      break;
    }
  }
  // even-order touches never change sign; pick up interior minima of |f|
  for (int k = 1; k < steps && (k + 1) * h < best; ++k) {
    if (std::abs(f[k]) >= std::abs(f[k - 1]) || std::abs(f[k]) >= std::abs(f[k + 1]))
      continue;
    double fmin = 0.0;
    double mu = refine_touch(sys, (k - 1) * h, (k + 1) * h, &fmin);
    if (fmin < 1e-9) best = std::min(best, mu);
  }
  return best;
}

ExcursionReport excursion_index_check(const PositivePath& path) {
  const int d = path.dim();
  if (d != 2 && d != 4)
    throw dimension_error("excursion_index_check: only dims 2 and 4");
  if ((path.origin() - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
    throw dimension_error("excursion_index_check: path must start at the identity");
  ExcursionReport r;
  r.excursions = excursions(path, path.duration());
  CzReport cz = conley_zehnder_index(path);
  r.index = cz.index;
  r.short_path = is_short(path);
  r.stable_endpoint = is_stable(path.endpoint());
  if (r.short_path && r.stable_endpoint)
    r.ok_short_bound = r.excursions <= 1;
  r.ok_index_bound = r.excursions <= r.index + 1;
  return r;
}

}  // namespace sympos
