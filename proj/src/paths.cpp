#include "sympos/paths.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace sympos {

namespace {

bool open_region(Region r) {
  switch (r) {
    case Region::O_U_plus:
    case Region::O_U_minus:
    case Region::O_U:
    case Region::O_C:
    case Region::O_R_plus:
    case Region::O_R_minus:
    case Region::O_UR:
      return true;
    default:
      return false;
  }
}

bool circle_region(Region r) {
  return r == Region::O_U_plus || r == Region::O_U_minus || r == Region::O_U;
}

bool off_circle_region(Region r) {
  return r == Region::O_C || r == Region::O_R_plus || r == Region::O_R_minus ||
         r == Region::O_UR;
}

}  // namespace

PositivePath::PositivePath(Mat origin, std::vector<Segment> segments)
    : origin_(std::move(origin)), segments_(std::move(segments)) {
  detail::require_even(origin_, "PositivePath");
  auto rep = is_symplectic(origin_, 1e-6);
  if (!rep.ok)
    throw dimension_error("PositivePath: origin is not symplectic (residual " +
                          std::to_string(rep.residual) + ")");
  cut_.push_back(0.0);
  prefix_.push_back(origin_);
  for (const auto& seg : segments_) {
    detail::require_symmetric(seg.P, "PositivePath segment");
    if (seg.P.rows() != origin_.rows())
      throw dimension_error("PositivePath: segment dimension mismatch");
    if (!(seg.duration >= 0.0))
      throw dimension_error("PositivePath: segment duration must be >= 0");
    total_ += seg.duration;
    cut_.push_back(total_);
    prefix_.push_back(symp_exp(seg.P, seg.duration) * prefix_.back());
  }
}

Mat PositivePath::evaluate(double t) const {
  if (prefix_.empty()) throw dimension_error("PositivePath: empty path");
  t = std::clamp(t, 0.0, total_);
  auto it = std::upper_bound(cut_.begin(), cut_.end(), t);
  size_t k = (it == cut_.begin()) ? 0 : static_cast<size_t>(it - cut_.begin()) - 1;
  if (k >= segments_.size()) return prefix_.back();
  return symp_exp(segments_[k].P, t - cut_[k]) * prefix_[k];
}

Mat PositivePath::generator_at(double t, bool* corner) const {
  if (segments_.empty()) throw dimension_error("PositivePath: no segments");
  t = std::clamp(t, 0.0, total_);
  double snap = 1e-12 * std::max(1.0, total_);
  if (corner) *corner = false;
  for (size_t k = 1; k + 1 < cut_.size(); ++k) {
    if (std::abs(t - cut_[k]) <= snap) {
      if (corner)
        *corner = (segments_[k].P - segments_[k - 1].P).cwiseAbs().maxCoeff() > 1e-12;
      return segments_[k - 1].P;
    }
  }
  auto it = std::upper_bound(cut_.begin(), cut_.end(), t);
  size_t k = (it == cut_.begin()) ? 0 : static_cast<size_t>(it - cut_.begin()) - 1;
  k = std::min(k, segments_.size() - 1);
  return segments_[k].P;
}

PositivityReport verify_positive(const PositivePath& path) {
  PositivityReport rep;
  if (path.segments().empty()) return rep;
  rep.margin = std::numeric_limits<double>::infinity();
  for (const auto& seg : path.segments()) {
    if (seg.duration == 0.0) continue;
    Eigen::SelfAdjointEigenSolver<Mat> es(seg.P);
    rep.margin = std::min(rep.margin, es.eigenvalues().minCoeff());
  }
  if (!std::isfinite(rep.margin)) rep.margin = 0.0;
  rep.positive = rep.margin > 0.0;
  return rep;
}

PositivePath conjugate_path(const PositivePath& path, const Mat& X) {
  auto rep = is_symplectic(X, 1e-7);
  if (!rep.ok)
    throw dimension_error("conjugate_path: X is not symplectic");
  std::vector<Segment> segs;
  segs.reserve(path.segments().size());
  for (const auto& seg : path.segments()) {
    // exactly symmetric in exact arithmetic; drop the rounding skew
    Mat Q = X.transpose() * seg.P * X;
    segs.push_back({seg.duration, 0.5 * (Q + Q.transpose())});
  }
  return PositivePath(conjugate(path.origin(), X), std::move(segs));
}

PositivePath smooth_concat(const std::vector<PositivePath>& pieces,
                           double blend_width) {
  if (pieces.empty()) throw dimension_error("smooth_concat: no pieces");
  Mat origin = pieces.front().origin();
  std::vector<Segment> segs;
  Mat at = origin;
  for (const auto& piece : pieces) {
    double gap = (piece.origin() - at).cwiseAbs().maxCoeff();
    if (gap > 1e-8)
      throw dimension_error("smooth_concat: piece origin does not match previous "
                            "endpoint (gap " + std::to_string(gap) + ")");
    for (const auto& seg : piece.segments())
      if (seg.duration > 0.0) segs.push_back(seg);
    // re-base exactly: continue from the product endpoint, not the stored origin
    at = PositivePath(at, std::vector<Segment>(piece.segments())).endpoint();
  }
  if (blend_width > 0.0) {
    std::vector<Segment> blended;
    for (size_t k = 0; k < segs.size(); ++k) {
      Segment cur = segs[k];
      if (k + 1 < segs.size() &&
          (segs[k + 1].P - cur.P).cwiseAbs().maxCoeff() > 1e-12) {
        double w = std::min({blend_width, cur.duration / 2, segs[k + 1].duration / 2});
        if (w > 0.0) {
          cur.duration -= w;
          blended.push_back(cur);
          blended.push_back({2 * w, 0.5 * (cur.P + segs[k + 1].P)});
          segs[k + 1].duration -= w;
          continue;
        }
      }
      blended.push_back(cur);
    }
    segs = std::move(blended);
  }
  return PositivePath(origin, std::move(segs));
}

namespace {

struct RefinedCrossing {
  double t = 0.0;
  Region from, to, boundary;
  std::optional<char> sign;
  cplx where;
};

cplx crossing_eigenvalue(const EigenStructure& es) {
  for (const auto& g : es.groups)
    if (g.mult >= 2 || g.kind == GroupKind::PlusOne || g.kind == GroupKind::MinusOne)
      return g.lambda;
  // fall back to whichever group sits closest to +-1
  cplx best = 1.0;
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& g : es.groups)
    for (double s : {1.0, -1.0})
      if (std::abs(g.lambda - s) < dist) {
        dist = std::abs(g.lambda - s);
        best = s;
      }
  return best;
}

Region infer_boundary(Region a, Region b, const cplx& where) {
  auto pair_is = [&](Region x, Region y) {
    return (a == x && b == y) || (a == y && b == x);
  };
  if (pair_is(Region::O_U_plus, Region::O_U_minus))
    return (where.real() < 0) ? Region::AtMinusOne : Region::AtPlusOne;
  if ((circle_region(a) && b == Region::O_C) || (circle_region(b) && a == Region::O_C))
    return Region::B_U;
  if ((a == Region::O_C && (b == Region::O_R_plus || b == Region::O_R_minus)) ||
      (b == Region::O_C && (a == Region::O_R_plus || a == Region::O_R_minus)))
    return Region::B_R;
  if (pair_is(Region::O_U_plus, Region::O_R_plus) ||
      pair_is(Region::O_U_minus, Region::O_R_plus))
    return Region::AtPlusOne;
  if (pair_is(Region::O_U_plus, Region::O_R_minus) ||
      pair_is(Region::O_U_minus, Region::O_R_minus))
    return Region::AtMinusOne;
  if ((a == Region::O_U && b == Region::O_UR) || (b == Region::O_U && a == Region::O_UR))
    return Region::B_UR;
  if ((a == Region::O_UR && (b == Region::O_R_plus || b == Region::O_R_minus)) ||
      (b == Region::O_UR && (a == Region::O_R_plus || a == Region::O_R_minus)))
    return Region::B_RU;
  return Region::NonGeneric;
}

void refine_crossing(const PositivePath& path, double ta, Region ra, double tb,
                     Region rb, double tol_circle, double t_tol, int depth,
                     std::vector<RefinedCrossing>& out) {
  if (ra == rb || depth > 60) return;
  double tm = 0.5 * (ta + tb);
  Mat Am = path.evaluate(tm);
  StratumLabel lm = classify(Am, tol_circle);
  if (!open_region(lm.region)) {
    RefinedCrossing c;
    c.t = tm;
    c.from = ra;
    c.to = rb;
    c.boundary = lm.region;
    c.sign = lm.nilpotent_sign;
    c.where = crossing_eigenvalue(eigen_structure(Am, tol_circle));
    out.push_back(c);
    return;
  }
  if (tb - ta < t_tol) {
    RefinedCrossing c;
    c.t = tm;
    c.from = ra;
    c.to = rb;
    EigenStructure em = eigen_structure(Am, tol_circle);
    c.where = crossing_eigenvalue(em);
    c.boundary = infer_boundary(ra, rb, c.where);
    try {
      c.sign = nilpotent_sign(Am, c.where, tol_circle);
    } catch (const std::exception&) {
      c.sign = std::nullopt;
    }
    out.push_back(c);
    return;
  }
  if (lm.region == ra) {
    refine_crossing(path, tm, lm.region, tb, rb, tol_circle, t_tol, depth + 1, out);
  } else if (lm.region == rb) {
    refine_crossing(path, ta, ra, tm, lm.region, tol_circle, t_tol, depth + 1, out);
  } else {
    refine_crossing(path, ta, ra, tm, lm.region, tol_circle, t_tol, depth + 1, out);
    refine_crossing(path, tm, lm.region, tb, rb, tol_circle, t_tol, depth + 1, out);
  }
}

// multiset signature of group kinds and multiplicities
std::multiset<std::pair<int, int>> kind_signature(const EigenStructure& es) {
  std::multiset<std::pair<int, int>> sig;
  for (const auto& g : es.groups)
    sig.insert({static_cast<int>(g.kind), g.mult});
  return sig;
}

double orbit_distance(const EigenGroup& a, const EigenGroup& b) {
  auto orbit = [](const EigenGroup& g) {
    std::vector<cplx> o = {g.lambda, std::conj(g.lambda)};
    if (std::abs(g.lambda) > 1e-12) {
      o.push_back(1.0 / g.lambda);
      o.push_back(1.0 / std::conj(g.lambda));
    }
    return o;
  };
  double best = std::numeric_limits<double>::infinity();
  for (const cplx& x : orbit(a))
    for (const cplx& y : orbit(b)) best = std::min(best, std::abs(x - y));
  return best;
}

}  // namespace

Trajectory eigen_trajectory(const PositivePath& path, int samples,
                            double tol_circle) {
  if (samples < 2) throw dimension_error("eigen_trajectory: need samples >= 2");
  const double T = path.duration();
  const int d = path.dim();
  Trajectory traj;

  std::map<double, TrajectorySample> grid;
  auto sample_at = [&](double t) -> TrajectorySample& {
    auto it = grid.find(t);
    if (it != grid.end()) return it->second;
    TrajectorySample s;
    s.t = t;
    Mat A = path.evaluate(t);
    s.es = eigen_structure(A, tol_circle);
    traj.max_symp_residual =
        std::max(traj.max_symp_residual, symplectic_residual(A));
    return grid.emplace(t, std::move(s)).first->second;
  };

  for (int k = 0; k <= samples; ++k) sample_at(T * k / samples);

  // refine where the spectral signature changes so merges are well localized
  const double dt_min = std::max(T / (64.0 * samples), 1e-12);
  bool changed = true;
  int guard = 0;
  while (changed && ++guard < 8) {
    changed = false;
    std::vector<double> mids;
    auto prev = grid.begin();
    for (auto it = std::next(grid.begin()); it != grid.end(); ++it, ++prev) {
      if (it->first - prev->first <= dt_min) continue;
      if (kind_signature(prev->second.es) != kind_signature(it->second.es))
        mids.push_back(0.5 * (prev->first + it->first));
    }
    for (double t : mids) {
      sample_at(t);
      changed = true;
    }
  }

  // track assignment by orbit continuity
  int next_track = 0;
  const TrajectorySample* prev = nullptr;
  for (auto& [t, s] : grid) {
    s.track.assign(s.es.groups.size(), -1);
    if (prev) {
      std::vector<bool> used(prev->es.groups.size(), false);
      for (size_t i = 0; i < s.es.groups.size(); ++i) {
        double best = 0.5;
        int pick = -1;
        for (size_t j = 0; j < prev->es.groups.size(); ++j) {
          if (used[j]) continue;
          double dd = orbit_distance(s.es.groups[i], prev->es.groups[j]);
          if (dd < best) {
            best = dd;
            pick = static_cast<int>(j);
          }
        }
        if (pick >= 0) {
          s.track[i] = prev->track[pick];
          used[pick] = true;
        }
      }
    }
    for (auto& id : s.track)
      if (id < 0) id = next_track++;
    prev = &s;
  }
  traj.tracks = next_track;

  for (auto& [t, s] : grid) traj.samples.push_back(s);

  if (d != 2 && d != 4) return traj;

  // stratum itinerary over the refined grid
  std::vector<std::pair<double, Region>> regions;
  regions.reserve(traj.samples.size());
  std::vector<StratumLabel> labels;
  for (const auto& s : traj.samples) {
    StratumLabel lab = classify(path.evaluate(s.t), tol_circle);
    regions.emplace_back(s.t, lab.region);
    labels.push_back(lab);
  }

  const double t_tol = std::max(1e-11 * std::max(T, 1.0), 1e-13);
  std::vector<RefinedCrossing> crossings;
  for (size_t k = 0; k + 1 < regions.size(); ++k) {
    auto [ta, ra] = regions[k];
    auto [tb, rb] = regions[k + 1];
    if (ra == rb) continue;
    if (!open_region(ra) || !open_region(rb)) {
      // the grid landed on (or near) a boundary stratum; record it directly
      RefinedCrossing c;
      size_t at = open_region(ra) ? k + 1 : k;
      c.t = regions[at].first;
      c.boundary = regions[at].second;
      c.from = ra;
      c.to = rb;
      c.sign = labels[at].nilpotent_sign;
      c.where = crossing_eigenvalue(traj.samples[at].es);
      if (!open_region(ra) && k > 0) c.from = regions[k - 1].second;
      if (!open_region(rb) && k + 2 < regions.size()) c.to = regions[k + 2].second;
      if (open_region(c.from) && open_region(c.to) && c.from != c.to)
        crossings.push_back(c);
      continue;
    }
    refine_crossing(path, ta, ra, tb, rb, tol_circle, t_tol, 0, crossings);
  }
  std::sort(crossings.begin(), crossings.end(),
            [](const RefinedCrossing& a, const RefinedCrossing& b) { return a.t < b.t; });
  crossings.erase(std::unique(crossings.begin(), crossings.end(),
                              [](const RefinedCrossing& a, const RefinedCrossing& b) {
                                return std::abs(a.t - b.t) < 1e-10;
                              }),
                  crossings.end());
  for (const auto& c : crossings) {
    BoundaryCrossing bc;
    bc.t = c.t;
    bc.from = c.from;
    bc.to = c.to;
    bc.boundary = c.boundary;
    bc.sign = c.sign;
    bc.where = c.where;
    traj.crossings.push_back(bc);
  }

  // coalesce open-region runs into intervals, snapping ends to crossing times
  std::vector<ItineraryInterval> itin;
  size_t k = 0;
  while (k < regions.size()) {
    if (!open_region(regions[k].second)) {
      // keep a genuinely dwelt boundary run (more than one grid sample wide)
      size_t j = k;
      while (j + 1 < regions.size() && regions[j + 1].second == regions[k].second) ++j;
      if (j > k) {
        ItineraryInterval iv;
        iv.t0 = regions[k].first;
        iv.t1 = regions[j].first;
        iv.label = labels[k];
        itin.push_back(iv);
      }
      k = j + 1;
      continue;
    }
    size_t j = k;
    while (j + 1 < regions.size() && regions[j + 1].second == regions[k].second) ++j;
    ItineraryInterval iv;
    iv.t0 = regions[k].first;
    iv.t1 = regions[j].first;
    iv.label = labels[k];
    itin.push_back(iv);
    k = j + 1;
  }
  for (auto& iv : itin) {
    for (const auto& c : traj.crossings) {
      if (c.t <= iv.t0 && iv.t0 - c.t < 0.51 * T / samples) iv.t0 = c.t;
      if (c.t >= iv.t1 && c.t - iv.t1 < 0.51 * T / samples) iv.t1 = c.t;
    }
  }
  if (!itin.empty()) {
    itin.front().t0 = 0.0;
    itin.back().t1 = T;
  }
  traj.itinerary = std::move(itin);
  return traj;
}

AuditReport audit_itinerary(const Trajectory& traj) {
  AuditReport rep;
  auto fail = [&](const std::string& why) {
    rep.legal = false;
    if (!rep.violation.empty()) rep.violation += "; ";
    rep.violation += why;
  };
  for (const auto& c : traj.crossings) {
    bool from_circle = circle_region(c.from);
    bool to_circle = circle_region(c.to);
    switch (c.boundary) {
      case Region::B_R:
        break;  // both directions are legal
      case Region::B_U:
      case Region::B_UR:
      case Region::B_RU:
      case Region::AtPlusOne:
      case Region::AtMinusOne: {
        if (from_circle == to_circle) break;  // transit or spectator move
        if (!c.sign) break;                   // no flavor resolved; nothing to check
        char need = from_circle ? '-' : '+';
        if (*c.sign != need)
          fail("crossing at t=" + std::to_string(c.t) + " through " +
               to_string(c.boundary) + " has flavor '" + *c.sign +
               "' but moves " + (from_circle ? "off" : "onto") + " the circle");
        break;
      }
      case Region::NonGeneric:
        fail("ambiguous boundary at t=" + std::to_string(c.t));
        break;
      default:
        break;
    }
  }
  return rep;
}

namespace {

double det_gap(const Mat& A, double shift) {
  const int d = static_cast<int>(A.rows());
  Mat M = A - shift * Mat::Identity(d, d);
  double scale = std::pow(1.0 + A.cwiseAbs().maxCoeff(), d);
  return M.determinant() / scale;
}

int kernel_dim(const Mat& A, double shift) {
  const int d = static_cast<int>(A.rows());
  Mat M = A - shift * Mat::Identity(d, d);
  Eigen::JacobiSVD<Mat> svd(M);
  double smax = svd.singularValues()(0);
  int k = 0;
  for (int i = 0; i < d; ++i)
    if (svd.singularValues()(i) <= 1e-6 * std::max(smax, 1.0)) ++k;
  return k;
}

struct VarietyHits {
  std::vector<double> times;
  std::vector<int> mults;
  bool tangency = false;
};

// Locates zeros of t -> det(A_t - Id) on (t_lo, T]: sign changes by bisection
// and non-negative touches by minimum refinement.
VarietyHits variety_hits(const PositivePath& path, const Mat& twist, double eps,
                         int samples, double t_lo) {
  const double T = path.duration();
  auto value = [&](double t) {
    Mat A = path.evaluate(t);
    if (eps != 0.0) A = expm(Mat(eps * t * twist)) * A;
    return det_gap(A, 1.0);
  };
  auto matrix_at = [&](double t) {
    Mat A = path.evaluate(t);
    if (eps != 0.0) A = expm(Mat(eps * t * twist)) * A;
    return A;
  };
  VarietyHits hits;
  if (T <= 0.0) return hits;
  std::vector<double> ts(samples + 1);
  std::vector<double> fs(samples + 1);
  for (int k = 0; k <= samples; ++k) {
    ts[k] = T * k / samples;
    fs[k] = value(ts[k]);
  }
  const double zero_tol = 1e-11;
  auto push_hit = [&](double t, bool tangent) {
    int mult = kernel_dim(matrix_at(t), 1.0);
    if (mult == 0) return;
    if (!hits.times.empty() && std::abs(hits.times.back() - t) < 2.0 * T / samples)
      return;
    hits.times.push_back(t);
    hits.mults.push_back(mult);
    hits.tangency = hits.tangency || tangent;
  };
  for (int k = 0; k + 1 <= samples; ++k) {
    if (ts[k + 1] <= t_lo) continue;
    double fa = fs[k], fb = fs[k + 1];
    if (fa == 0.0 && ts[k] > t_lo) {
      push_hit(ts[k], false);
      continue;
    }
    if (fa * fb < 0.0) {
      double a = ts[k], b = ts[k + 1];
      for (int it = 0; it < 80 && b - a > 1e-13 * std::max(T, 1.0); ++it) {
        double m = 0.5 * (a + b);
        double fm = value(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if (fa * fm < 0)
          b = m;
        else {
          a = m;
          fa = fm;
        }
      }
      push_hit(0.5 * (a + b), false);
    } else if (k > 0 && std::abs(fs[k]) < std::abs(fs[k - 1]) &&
               std::abs(fs[k]) <= std::abs(fs[k + 1]) && ts[k] > t_lo) {
      // local minimum of |f|: refine by golden-section and accept if it
      // reaches the variety without a sign change
      double a = ts[k - 1], b = ts[k + 1];
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = std::abs(value(x1)), f2 = std::abs(value(x2));
      for (int it = 0; it < 200 && b - a > 1e-12 * std::max(T, 1.0); ++it) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = std::abs(value(x1));
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = std::abs(value(x2));
        }
      }
      double t_star = 0.5 * (a + b);
      if (std::abs(value(t_star)) < zero_tol) push_hit(t_star, true);
    }
  }
  return hits;
}

double first_positive_clearance(const std::vector<double>& fs,
                                const std::vector<double>& ts) {
  for (size_t k = 0; k < fs.size(); ++k)
    if (std::abs(fs[k]) > 1e-8) return ts[k];
  return ts.empty() ? 0.0 : ts.back();
}

}  // namespace

CzReport conley_zehnder_index(const PositivePath& path, int samples) {
  if (samples < 16) throw dimension_error("conley_zehnder_index: too few samples");
  const double T = path.duration();
  const int d = path.dim();
  Mat twist = standard_J(d);

  // skip the initial departure from the variety when the path starts at Id
  double t_lo = 0.0;
  {
    std::vector<double> ts(65), fs(65);
    for (int k = 0; k <= 64; ++k) {
      ts[k] = T * k / (64.0 * 8.0);
      fs[k] = det_gap(path.evaluate(ts[k]), 1.0);
    }
    if (std::abs(fs[0]) < 1e-10) t_lo = first_positive_clearance(fs, ts);
  }

  CzReport rep;
  int last = -1;
  double eps = 1e-3;
  for (int round = 0; round < 10; ++round) {
    VarietyHits hits = variety_hits(path, twist, eps, samples, t_lo);
    int total = 0;
    for (int m : hits.mults) total += m;
    if (total == last) {
      rep.index = total;
      rep.eps = eps;
      rep.crossing_times = hits.times;
      rep.tangency = hits.tangency;
      return rep;
    }
    last = total;
    rep.index = total;
    rep.eps = eps;
    rep.crossing_times = hits.times;
    rep.tangency = hits.tangency;
    eps *= 0.5;
  }
  return rep;
}

bool is_short(const PositivePath& path, int samples) {
  const int d = path.dim();
  if ((path.origin() - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
    throw dimension_error("is_short: path must start at the identity");
  const double T = path.duration();
  if (T <= 0.0) return true;
  std::vector<double> ts(samples + 1), fs(samples + 1);
  for (int k = 0; k <= samples; ++k) {
    ts[k] = T * k / samples;
    fs[k] = det_gap(path.evaluate(ts[k]), 1.0);
  }
  double t_lo = first_positive_clearance(fs, ts);
  VarietyHits hits = variety_hits(path, standard_J(d), 0.0, samples, t_lo);
  return hits.times.empty();
}

int excursions(const PositivePath& path, double s, int samples) {
  if (path.dim() != 2 && path.dim() != 4)
    throw unsupported_error("excursions: only dims 2 and 4");
  s = std::clamp(s, 0.0, path.duration());
  Trajectory traj = eigen_trajectory(path, samples);
  struct Run {
    double t0, t1;
    bool off;
  };
  std::vector<Run> runs;
  for (const auto& iv : traj.itinerary) {
    if (iv.t0 > s) break;
    bool off = off_circle_region(iv.label.region) ||
               iv.label.region == Region::B_R;
    if (!off && !circle_region(iv.label.region)) continue;  // boundary dwell
    if (!runs.empty() && runs.back().off == off)
      runs.back().t1 = iv.t1;
    else
      runs.push_back({iv.t0, iv.t1, off});
  }
  int count = 0;
  for (size_t k = 0; k + 1 < runs.size(); ++k)
    if (runs[k].off && !runs[k + 1].off && runs[k + 1].t0 <= s) ++count;
  return count;
}

PathDiagnostics diagnose(const PositivePath& path, int samples) {
  if (path.dim() != 2 && path.dim() != 4)
    throw unsupported_error("diagnose: only dims 2 and 4");
  PathDiagnostics d;
  d.positivity = verify_positive(path);
  Trajectory traj = eigen_trajectory(path, samples);
  d.max_symp_residual = traj.max_symp_residual;
  d.audit = audit_itinerary(traj);
  bool from_id = (path.origin() - Mat::Identity(path.dim(), path.dim()))
                     .cwiseAbs()
                     .maxCoeff() < 1e-9;
  if (from_id) {
    d.short_path = is_short(path, std::max(samples, 1024));
    d.cz = conley_zehnder_index(path, std::max(samples, 1024));
  }
  d.excursions_full = excursions(path, path.duration(), samples);
  return d;
}

}  // namespace sympos
