#include "sympos/steering.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sympos {

namespace {

constexpr double kTau = 0.15;    // half-width of the N-class crossing primitives
constexpr double kTauBR = 0.05;  // half-width of the B_R crossing primitive

Mat slide_up_P() {
  Mat P(2, 2);
  P << 2, -1, -1, 1;  // moves |lambda| outward on the diagonal family
  return P;
}

Mat slide_down_P() {
  Mat P(2, 2);
  P << 2, 1, 1, 1;
  return P;
}

Mat br_cross_P() {
  Mat P(4, 4);
  P << 1, 0, 0, -2, 0, 5, 0, 0, 0, 0, 1, 0, -2, 0, 0, 5;
  return P;
}

Mat spd_sqrt(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  if (es.eigenvalues().minCoeff() <= 0)
    throw numerical_error("spd_sqrt: matrix is not positive definite");
  return es.eigenvectors() *
         es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

Mat spd_log(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  if (es.eigenvalues().minCoeff() <= 0)
    throw numerical_error("spd_log: matrix is not positive definite");
  return es.eigenvectors() *
         es.eigenvalues().array().log().matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

// symmetric S with exp(J S) = M, via the principal matrix logarithm
Mat hamiltonian_log(const Mat& M) {
  Mat L = M.log();
  Mat J = standard_J(static_cast<int>(M.rows()));
  Mat S = -J * L;
  S = 0.5 * (S + S.transpose());
  double resid = (expm(Mat(J * S)) - M).cwiseAbs().maxCoeff() /
                 (1.0 + M.cwiseAbs().maxCoeff());
  if (resid > 1e-8)
    throw numerical_error("hamiltonian_log: matrix has no usable logarithm");
  return S;
}

// Appends positive segments realizing exp(J S) for arbitrary symmetric S by
// splitting into m small factors and completing each with a full turn:
// exp(J S/m) = exp(J W) exp((2pi - 1) J) with W = -J log(exp(J S/m) exp(J)).
void emit_exp_JS(const Mat& S, std::vector<Segment>& segs,
                 std::vector<std::pair<LegKind, std::string>>& meta) {
  const int d = static_cast<int>(S.rows());
  Mat J = standard_J(d);
  Mat I = Mat::Identity(d, d);
  double norm = Eigen::SelfAdjointEigenSolver<Mat>(S).eigenvalues().cwiseAbs().maxCoeff();
  int m = std::max(1, static_cast<int>(std::ceil(norm / 0.35)));
  for (int attempt = 0; attempt < 8; ++attempt, m *= 2) {
    Mat Sm = S / m;
    Mat M = expm(Mat(J * Sm)) * expm(J);
    Mat W;
    try {
      W = hamiltonian_log(M);
    } catch (const numerical_error&) {
      continue;
    }
    double margin = Eigen::SelfAdjointEigenSolver<Mat>(W).eigenvalues().minCoeff();
    if (margin < 0.02) continue;
    const double wrap = 2.0 * std::numbers::pi - 1.0;
    for (int k = 0; k < m; ++k) {
      segs.push_back({wrap, I});
      meta.push_back({LegKind::Rotate, "full-turn wrap"});
      segs.push_back({1.0, W});
      meta.push_back({LegKind::Correction,
                      "factor " + std::to_string(k + 1) + "/" + std::to_string(m)});
    }
    return;
  }
  throw numerical_error("emit_exp_JS: could not split the factor positively");
}

double angle_of_rotation_block(const Mat& R2) {
  double a = std::atan2(R2(1, 0), R2(0, 0));
  return a < 0 ? a + 2.0 * std::numbers::pi : a;
}

PositivePath scale_time(const PositivePath& p, double c) {
  if (c <= 0) throw dimension_error("scale_time: factor must be positive");
  std::vector<Segment> segs;
  for (const auto& s : p.segments()) segs.push_back({s.duration * c, s.P / c});
  return PositivePath(p.origin(), std::move(segs));
}

// Direct sum of two 2x2 paths over a common time axis.
PositivePath product4(const PositivePath& a, const PositivePath& b) {
  PositivePath pa = a, pb = b;
  double T = std::max(pa.duration(), pb.duration());
  if (T <= 0) throw dimension_error("product4: zero-duration blocks");
  if (pa.duration() <= 0 || pb.duration() <= 0)
    throw dimension_error("product4: both blocks need positive duration");
  pa = scale_time(pa, T / pa.duration());
  pb = scale_time(pb, T / pb.duration());
  std::vector<double> cuts = {0.0, T};
  double acc = 0.0;
  for (const auto& s : pa.segments()) cuts.push_back(acc += s.duration);
  acc = 0.0;
  for (const auto& s : pb.segments()) cuts.push_back(acc += s.duration);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-12; }),
             cuts.end());
  Mat origin = blk(pa.origin(), pb.origin());
  std::vector<Segment> segs;
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    Mat P = blk(pa.generator_at(mid), pb.generator_at(mid));
    segs.push_back({cuts[k + 1] - cuts[k], P});
  }
  return PositivePath(origin, std::move(segs));
}

// Conjugates piece so that its origin lands exactly on E (same conjugacy
// class, matched through the shared canonical form).
PositivePath match_origin(const Mat& E, const PositivePath& piece) {
  NormalForm nf_e = normal_form(E);
  NormalForm nf_o = normal_form(piece.origin());
  double gap = (nf_e.N - nf_o.N).cwiseAbs().maxCoeff();
  if (gap > 1e-5)
    throw numerical_error("match_origin: pieces are not in the same class (gap " +
                          std::to_string(gap) + ")");
  Mat Z = nf_o.X * nf_e.X.inverse();
  return conjugate_path(piece, Z);
}

struct RouteBuilder {
  std::vector<PositivePath> pieces;
  std::vector<std::pair<LegKind, std::string>> meta;
  Mat at;

  explicit RouteBuilder(Mat start) : at(std::move(start)) {}

  void add(LegKind k, std::string detail, const PositivePath& piece,
           bool glue = true) {
    PositivePath p = piece;
    if (glue && (p.origin() - at).cwiseAbs().maxCoeff() > 1e-9)
      p = match_origin(at, p);
    at = p.endpoint();
    pieces.push_back(std::move(p));
    meta.push_back({k, std::move(detail)});
  }

  Route finish(const Mat* target) {
    Route r;
    PositivePath whole = smooth_concat(pieces);
    if (target) {
      NormalForm nf_e = normal_form(whole.endpoint());
      NormalForm nf_b = normal_form(*target);
      Mat Z = nf_e.X * nf_b.X.inverse();
      whole = conjugate_path(whole, Z);
      r.endpoint_residual = (whole.endpoint() - *target).cwiseAbs().maxCoeff() /
                            (1.0 + target->cwiseAbs().maxCoeff());
    }
    double t = 0.0;
    for (size_t k = 0; k < pieces.size(); ++k) {
      RouteLeg leg;
      leg.kind = meta[k].first;
      leg.detail = meta[k].second;
      leg.t0 = t;
      t += pieces[k].duration();
      leg.t1 = t;
      r.legs.push_back(leg);
    }
    r.path = std::move(whole);
    r.margin = verify_positive(r.path).margin;
    return r;
  }
};

// Crossing primitive at +-1 or at a circle Jordan class; when half is set the
// path stops exactly on the class representative.
PositivePath prim_N(cplx lambda, char sign, bool half_before, double tau) {
  bool is_pm1 = std::abs(lambda.imag()) < 1e-12;
  Mat N = is_pm1 ? rep_nilpotent_pm1(lambda.real() > 0 ? 1.0 : -1.0, sign)
                 : rep_circle_nilpotent(lambda / std::abs(lambda), sign);
  Mat I = Mat::Identity(N.rows(), N.cols());
  Mat origin = symp_exp(I, -tau) * N;
  std::vector<Segment> segs;
  segs.push_back({half_before ? tau : 2 * tau, I});
  return PositivePath(origin, std::move(segs));
}

// B_R crossing primitive at real double eigenvalue r: picks the sign of the
// family parameter so the path runs from `from` into the opposite side.
PositivePath prim_BR(double r, Region from, bool half_before, double tau) {
  Mat P = br_cross_P();
  for (double alpha : {1.0, -1.0}) {
    Mat N = rep_real_double(r, alpha);
    Mat origin = symp_exp(P, -tau) * N;
    if (classify(origin).region != from) continue;
    std::vector<Segment> segs;
    segs.push_back({half_before ? tau : 2 * tau, P});
    return PositivePath(origin, std::move(segs));
  }
  throw numerical_error("prim_BR: no crossing direction starts in " +
                        std::string(to_string(from)));
}

struct QuadParams {
  double logr = 0.0;
  double theta = 0.0;
};

QuadParams quad_params(const Mat& A) {
  EigenStructure es = eigen_structure(A);
  for (const auto& g : es.groups)
    if (g.kind == GroupKind::Quadruplet)
      return {std::log(std::abs(g.lambda)), std::arg(g.lambda)};
  throw numerical_error("quad_params: matrix is not in the quadruplet stratum");
}

// Leaving the circle through a '-' class pins the class angle: along
// exp(u J P) N the invariant arg(lambda) never moves, while log |lambda|
// rises from zero, peaks, and returns to the circle. Conjugated diagonal
// drives stretch the excursion, so every depth is reached by some s.
struct ArchPlan {
  Mat N;
  Mat P;
  double u_star;
  double u_return;
};

double arch_logr(const Mat& P, const Mat& N, double u) {
  Eigen::EigenSolver<Mat> es(symp_exp(P, u) * N);
  double top = 0.0;
  for (int i = 0; i < 4; ++i)
    top = std::max(top, std::log(std::abs(es.eigenvalues()(i))));
  return top;
}

ArchPlan plan_arch(double theta, double logr) {
  Mat N = rep_circle_nilpotent(std::polar(1.0, theta), '-');
  for (double s = 1.0; s <= 1048576.0; s *= 2.0) {
    Mat P = Mat::Zero(4, 4);
    P(0, 0) = P(2, 2) = s * s;
    P(1, 1) = P(3, 3) = 1.0 / (s * s);
    double peak = 0.0, u_peak = 0.0, u_off = 0.0, u_on = -1.0;
    for (double u = 0.01; u < 6.0; u += 0.01) {
      double lr = arch_logr(P, N, u);
      if (lr > peak) {
        peak = lr;
        u_peak = u;
      }
      if (lr > 1e-6) u_off = u;
      if (peak > 1e-4 && lr < 1e-9) {
        u_on = u;
        break;
      }
    }
    if (peak < logr + 0.02 || u_on < 0) continue;
    double lo = 0.0, hi = u_peak;
    while (hi - lo > 1e-13)
      (arch_logr(P, N, 0.5 * (lo + hi)) < logr ? lo : hi) = 0.5 * (lo + hi);
    double rl = u_off, rh = u_on;
    while (rh - rl > 1e-12)
      (arch_logr(P, N, 0.5 * (rl + rh)) > 1e-11 ? rl : rh) = 0.5 * (rl + rh);
    return {N, P, 0.5 * (lo + hi), rh};
  }
  throw numerical_error("plan_arch: no diagonal drive reaches the requested radius");
}

// First time past the end of the excursion at which the endpoint sits
// cleanly inside O_U; starts just outside the grouping window and widens.
double arch_exit_time(const ArchPlan& plan, double theta) {
  double delta = std::max(1e-9, 0.02 * theta * theta / plan.P(0, 0));
  for (int k = 0; k < 48; ++k, delta *= 2.0) {
    double u = plan.u_return + delta;
    if (arch_logr(plan.P, plan.N, u) > 1e-10) continue;
    if (classify(symp_exp(plan.P, u) * plan.N).region == Region::O_U) return u;
  }
  throw numerical_error("plan_arch: could not settle on the circle after the excursion");
}

// Crossing half-width: the pair positions split like sqrt(tau) around the
// class angle, so tau shrinks quadratically to keep both clear of +1.
double cross_tau(double theta) { return std::min(kTau, 0.1 * theta * theta); }

// Exact one-block slide step data: with generator s*P1 (or s*P2) from the
// diagonal family, trace(t) = cos(s t) sigma1 + sin(s t) delta.
double slide_trace(double h, double sigma1, double delta) {
  return std::cos(h) * sigma1 + std::sin(h) * delta;
}

// One in-frame slide segment of magnitude at most cap toward target_out;
// returns the chosen angle h and sets P to the 2x2 generator used.
double slide_step(double lambda, double target_out, Mat& P) {
  bool up = std::abs(target_out) > std::abs(lambda);
  P = up ? slide_up_P() : slide_down_P();
  double sigma1 = lambda + 1.0 / lambda;
  double delta = (lambda - 1.0 / lambda) * (up ? 1.0 : -1.0);
  double target_trace = target_out + 1.0 / target_out;
  // trace(h) = R cos(h - phi0); monotone until the first stationary point
  double phi0 = std::atan2(delta, sigma1);
  double window = phi0 > 0 ? phi0 : phi0 + std::numbers::pi;
  double cap = std::min(0.7 * window, 1.0);
  double lo = 0.0, hi = cap;
  auto overshoot = [&](double h) {
    double tr = slide_trace(h, sigma1, delta);
    return (delta > 0) ? tr >= target_trace : tr <= target_trace;
  };
  if (!overshoot(hi)) return cap;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (overshoot(mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double outside_member(double l) { return std::abs(l) > 1.0 ? l : 1.0 / l; }

}  // namespace

const char* to_string(LegKind k) {
  switch (k) {
    case LegKind::Rotate: return "rotate";
    case LegKind::Slide: return "slide";
    case LegKind::CrossN: return "cross-N";
    case LegKind::CrossB_R: return "cross-B_R";
    case LegKind::Cap: return "cap";
    case LegKind::Correction: return "correction";
  }
  return "?";
}

PositivePath rotate_block(double theta_from, double theta_to) {
  if (!(theta_to > theta_from))
    throw dimension_error("rotate_block: need theta_to > theta_from");
  std::vector<Segment> segs;
  segs.push_back({theta_to - theta_from, Mat::Identity(2, 2)});
  return PositivePath(rep_rotation(theta_from), std::move(segs));
}

PositivePath real_slide(double lambda_from, double lambda_to) {
  if (std::abs(lambda_from) == 1.0 || lambda_from == 0.0 ||
      std::abs(lambda_to) == 1.0 || lambda_to == 0.0)
    throw dimension_error("real_slide: eigenvalues must avoid 0 and +-1");
  if ((lambda_from > 0) != (lambda_to > 0))
    throw infeasible_error("real_slide: cannot change the sign of a real pair");
  Mat origin = rep_real(lambda_from);
  double target = outside_member(lambda_to);
  std::vector<Segment> segs;
  Mat A = origin;
  for (int iter = 0; iter < 200; ++iter) {
    NormalForm nf = normal_form(A);
    double cur = outside_member(nf.N(0, 0));
    if (std::abs(std::log(std::abs(cur / target))) < 1e-12) break;
    Mat P2;
    double h = slide_step(cur, target, P2);
    if (h <= 0) break;
    Mat Xi = nf.X.inverse();
    Mat P = Xi.transpose() * P2 * Xi;
    P = 0.5 * (P + P.transpose());
    segs.push_back({h, P});
    A = symp_exp(P, h) * A;
  }
  PositivePath p(origin, std::move(segs));
  double end_l = outside_member(
      eigen_structure(p.endpoint()).groups[0].lambda.real());
  if (std::abs(end_l - outside_member(lambda_to)) > 1e-7)
    throw numerical_error("real_slide: endpoint eigenvalue missed the target");
  return p;
}

PositivePath exit_enter_via_N(cplx lambda, CrossDir dir, double tau) {
  if (!(tau > 0)) throw dimension_error("exit_enter_via_N: tau must be positive");
  if (std::abs(std::abs(lambda) - 1.0) > 1e-9)
    throw infeasible_error(
        "exit_enter_via_N: crossings exist only at unit-circle eigenvalues");
  char flavor = (dir == CrossDir::Exit) ? '-' : '+';
  return prim_N(lambda, flavor, false, tau);
}

Route connect(const Mat& A, const Mat& B) {
  detail::require_even(A, "connect");
  if (A.rows() != B.rows()) throw dimension_error("connect: dimension mismatch");
  for (const Mat* M : {&A, &B}) {
    auto rep = is_symplectic(*M, 1e-7);
    if (!rep.ok) throw dimension_error("connect: input is not symplectic");
  }
  const int d = static_cast<int>(A.rows());
  Mat G = B * A.inverse();
  Mat GtG = G.transpose() * G;
  GtG = 0.5 * (GtG + GtG.transpose());
  Mat Psym = spd_sqrt(GtG);
  Mat U = G * Psym.inverse();
  // re-orthogonalize the unitary factor
  U = U * spd_sqrt(Mat(0.5 * (U.transpose() * U +
                              (U.transpose() * U).transpose()))).inverse();
  Mat Sp = -standard_J(d) * spd_log(Psym);
  Sp = 0.5 * (Sp + Sp.transpose());

  std::vector<Segment> segs;
  std::vector<std::pair<LegKind, std::string>> meta;
  emit_exp_JS(Sp, segs, meta);

  double sigma = 0.0;
  Mat Up;
  for (double s : {0.5, 0.9, 1.3, 1.7, 2.1, 2.6}) {
    Mat cand = U * expm(Mat(-s * standard_J(d)));
    Eigen::EigenSolver<Mat> es(cand);
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i)
      gap = std::min(gap, std::abs(es.eigenvalues()(i) + 1.0));
    if (gap > 0.2) {
      sigma = s;
      Up = cand;
      break;
    }
  }
  if (sigma == 0.0) throw numerical_error("connect: unitary factor has no safe log");
  segs.push_back({sigma, Mat::Identity(d, d)});
  meta.push_back({LegKind::Rotate, "unitary phase"});
  emit_exp_JS(hamiltonian_log(Up), segs, meta);

  Route r;
  r.path = PositivePath(A, segs);
  r.endpoint_residual = (r.path.endpoint() - B).cwiseAbs().maxCoeff() /
                        (1.0 + B.cwiseAbs().maxCoeff());
  r.margin = verify_positive(r.path).margin;
  double t = 0.0;
  for (size_t k = 0; k < segs.size(); ++k) {
    RouteLeg leg;
    leg.kind = meta[k].first;
    leg.detail = meta[k].second;
    leg.t0 = t;
    t += segs[k].duration;
    leg.t1 = t;
    r.legs.push_back(leg);
  }
  if (r.endpoint_residual > 1e-8)
    throw numerical_error("connect: endpoint residual too large (" +
                          std::to_string(r.endpoint_residual) + ")");
  return r;
}

namespace {

int odd_parity_count(const EigenStructure& es) {
  int count = 0;
  for (const auto& g : es.groups)
    if (g.kind == GroupKind::RealPair && g.lambda.real() > 0) count += g.mult;
  return count;
}

// 2x2 path from the identity ending exactly on the class of N2 (canonical).
void build_block_route(RouteBuilder& rb, const Mat& N2) {
  StratumLabel lab = classify(N2);
  switch (lab.region) {
    case Region::O_U_plus:
    case Region::O_U_minus: {
      double theta = angle_of_rotation_block(normal_form(N2).N);
      rb.add(LegKind::Rotate, "rotate to " + std::to_string(theta),
             rotate_block(0.0, theta), false);
      return;
    }
    case Region::AtMinusOne: {
      if (!lab.nilpotent_sign) {
        rb.add(LegKind::Rotate, "rotate to -Id",
               rotate_block(0.0, std::numbers::pi), false);
        return;
      }
      if (*lab.nilpotent_sign == '-') {
        PositivePath half = prim_N(-1.0, '-', true, kTau);
        double theta = angle_of_rotation_block(normal_form(half.origin()).N);
        rb.add(LegKind::Rotate, "rotate toward -1", rotate_block(0.0, theta), false);
        rb.add(LegKind::CrossN, "land on the '-' class at -1", half);
        return;
      }
      PositivePath full = prim_N(-1.0, '-', false, kTau);
      double theta = angle_of_rotation_block(normal_form(full.origin()).N);
      rb.add(LegKind::Rotate, "rotate toward -1", rotate_block(0.0, theta), false);
      rb.add(LegKind::CrossN, "exit through '-' at -1", full);
      PositivePath half = prim_N(-1.0, '+', true, kTau);
      double from_l = eigen_structure(rb.at).groups[0].lambda.real();
      double to_l = eigen_structure(half.origin()).groups[0].lambda.real();
      if (std::abs(from_l - to_l) > 1e-12)
        rb.add(LegKind::Slide, "slide to the re-entry class",
               real_slide(from_l, to_l));
      rb.add(LegKind::CrossN, "land on the '+' class at -1", half);
      return;
    }
    case Region::O_R_minus: {
      double target = eigen_structure(N2).groups[0].lambda.real();
      PositivePath full = prim_N(-1.0, '-', false, kTau);
      double theta = angle_of_rotation_block(normal_form(full.origin()).N);
      rb.add(LegKind::Rotate, "rotate toward -1", rotate_block(0.0, theta), false);
      rb.add(LegKind::CrossN, "exit through '-' at -1", full);
      double from_l = eigen_structure(rb.at).groups[0].lambda.real();
      rb.add(LegKind::Slide, "slide to " + std::to_string(target),
             real_slide(from_l, target));
      return;
    }
    default:
      throw infeasible_error("short_path_to: block class " +
                             std::string(to_string(lab.region)) +
                             " is not reachable by a short block");
  }
}

PositivePath block_route_path(const Mat& N2) {
  RouteBuilder rb(Mat::Identity(2, 2));
  build_block_route(rb, N2);
  return smooth_concat(rb.pieces);
}

// Route from the identity into O_C, ending exactly at the prescribed class.
// The angle cannot move once off the circle, so the crossing happens at the
// target angle and the excursion depth is a one-parameter ride.
void build_into_OC(RouteBuilder& rb, QuadParams target) {
  ArchPlan plan = plan_arch(target.theta, target.logr);
  double tau = cross_tau(target.theta);
  Mat I4 = Mat::Identity(4, 4);
  Mat origin = symp_exp(I4, -tau) * plan.N;
  std::vector<Segment> segs;
  segs.push_back({tau, I4});
  segs.push_back({plan.u_star, plan.P});
  PositivePath exit(origin, std::move(segs));
  NormalForm nf = normal_form(origin);
  double a = angle_of_rotation_block(nf.N.topLeftCorner<2, 2>());
  double b = angle_of_rotation_block(nf.N.bottomRightCorner<2, 2>());
  rb.add(LegKind::Rotate,
         "rotate pair to the circle Jordan frame",
         product4(rotate_block(0.0, a), rotate_block(0.0, b)), false);
  rb.add(LegKind::CrossN, "cross B_U '-' and ride out to the target class", exit);
}

void build_OR_plus4(RouteBuilder& rb, double l1, double l2) {
  double r = std::sqrt(l1 * l2);
  PositivePath cross = prim_BR(r, Region::O_C, false, kTauBR);
  build_into_OC(rb, quad_params(cross.origin()));
  rb.add(LegKind::CrossB_R, "cross B_R into two real pairs", cross);
  // final slides within O_R_plus, one conjugated block generator per pair
  Mat A = rb.at;
  std::vector<Segment> segs;
  for (int iter = 0; iter < 120; ++iter) {
    NormalForm nf = normal_form(A);
    double c1 = outside_member(nf.N(0, 0));
    double c2 = outside_member(nf.N(2, 2));
    double t1 = std::min(l1, l2), t2 = std::max(l1, l2);
    if (std::abs(std::log(c1 / t1)) < 1e-10 && std::abs(std::log(c2 / t2)) < 1e-10)
      break;
    Mat Pa, Pb;
    double ha = slide_step(c1, t1, Pa);
    double hb = slide_step(c2, t2, Pb);
    double h = std::max({ha, hb, 1e-4});
    Mat P4 = blk(Mat((ha / h) * Pa), Mat((hb / h) * Pb));
    // a vanished block rate loses definiteness; keep a whisper of motion
    if (ha / h < 1e-9) P4.topLeftCorner(2, 2) = 1e-9 * Mat::Identity(2, 2);
    if (hb / h < 1e-9) P4.bottomRightCorner(2, 2) = 1e-9 * Mat::Identity(2, 2);
    Mat Xi = nf.X.inverse();
    Mat P = Xi.transpose() * P4 * Xi;
    P = 0.5 * (P + P.transpose());
    segs.push_back({h, P});
    A = symp_exp(P, h) * A;
  }
  if (!segs.empty())
    rb.add(LegKind::Slide, "slide the two pairs to their targets",
           PositivePath(rb.at, std::move(segs)), false);
}

}  // namespace

Route short_path_to(const Mat& B) {
  detail::require_even(B, "short_path_to");
  const int d = static_cast<int>(B.rows());
  if (d != 2 && d != 4)
    throw dimension_error("short_path_to: only dims 2 and 4");
  auto rep = is_symplectic(B, 1e-7);
  if (!rep.ok) throw dimension_error("short_path_to: B is not symplectic");
  double det_gap = (B - Mat::Identity(d, d)).determinant();
  if (std::abs(det_gap) < 1e-9 * std::pow(1.0 + B.cwiseAbs().maxCoeff(), d))
    throw infeasible_error(
        "short_path_to: endpoint lies on the eigenvalue-1 variety");
  EigenStructure es = eigen_structure(B);
  int parity = odd_parity_count(es);
  if (parity % 2 != 0)
    throw infeasible_error(
        "short_path_to: parity rule violated: " + std::to_string(parity) +
        " real eigenvalues greater than one (with multiplicity); short positive "
        "paths reach only endpoints with an even count");

  StratumLabel lab = classify(B);
  NormalForm nfB = normal_form(B);
  RouteBuilder rb(Mat::Identity(d, d));

  if (d == 2) {
    build_block_route(rb, nfB.N);
    return rb.finish(&B);
  }

  switch (lab.region) {
    case Region::O_U:
    case Region::O_UR:
    case Region::O_R_minus:
    case Region::B_UR:
    case Region::B_RU: {
      Mat N1 = nfB.N.topLeftCorner<2, 2>();
      Mat N2 = nfB.N.bottomRightCorner<2, 2>();
      rb.add(LegKind::Rotate, "block product route",
             product4(block_route_path(N1), block_route_path(N2)), false);
      return rb.finish(&B);
    }
    case Region::AtMinusOne: {
      rb.add(LegKind::Rotate, "double rotation to -Id",
             product4(rotate_block(0.0, std::numbers::pi),
                      rotate_block(0.0, std::numbers::pi)),
             false);
      return rb.finish(&B);
    }
    case Region::O_C: {
      build_into_OC(rb, quad_params(B));
      return rb.finish(&B);
    }
    case Region::B_U: {
      cplx l = es.groups[0].lambda;
      char s = *lab.nilpotent_sign;
      if (s == '-') {
        PositivePath half = prim_N(l, '-', true, cross_tau(std::arg(l)));
        NormalForm nf = normal_form(half.origin());
        double a = angle_of_rotation_block(nf.N.topLeftCorner<2, 2>());
        double b = angle_of_rotation_block(nf.N.bottomRightCorner<2, 2>());
        rb.add(LegKind::Rotate, "rotate pair toward the circle Jordan class",
               product4(rotate_block(0.0, a), rotate_block(0.0, b)), false);
        rb.add(LegKind::CrossN, "land on B_U '-'", half);
      } else {
        PositivePath half = prim_N(l, '+', true, kTau);
        build_into_OC(rb, quad_params(half.origin()));
        rb.add(LegKind::CrossN, "land on B_U '+'", half);
      }
      return rb.finish(&B);
    }
    case Region::B_R: {
      double r = es.groups[0].lambda.real();
      PositivePath half = prim_BR(r, Region::O_C, true, kTauBR);
      build_into_OC(rb, quad_params(half.origin()));
      rb.add(LegKind::CrossB_R, "land on B_R", half);
      return rb.finish(&B);
    }
    case Region::O_R_plus: {
      double l1 = outside_member(es.groups[0].lambda.real());
      double l2 = outside_member(es.groups[1].lambda.real());
      build_OR_plus4(rb, std::min(l1, l2), std::max(l1, l2));
      return rb.finish(&B);
    }
    default:
      throw unsupported_error("short_path_to: unsupported stratum " +
                              std::string(to_string(lab.region)));
  }
}

namespace {

// 2x2 continuation from a canonical block to the circle-only region.
PositivePath block_extension(const Mat& N2) {
  StratumLabel lab = classify(N2);
  RouteBuilder rb(N2);
  switch (lab.region) {
    case Region::O_U_plus:
    case Region::O_U_minus: {
      double theta = angle_of_rotation_block(normal_form(N2).N);
      double step = 0.05;
      rb.add(LegKind::Rotate, "nudge along the circle",
             rotate_block(theta, theta + step));
      return smooth_concat(rb.pieces);
    }
    case Region::O_R_minus: {
      PositivePath enter = prim_N(-1.0, '+', false, kTau);
      double to_l = eigen_structure(enter.origin()).groups[0].lambda.real();
      double from_l = eigen_structure(N2).groups[0].lambda.real();
      if (std::abs(from_l - to_l) > 1e-12)
        rb.add(LegKind::Slide, "slide to the re-entry class",
               real_slide(from_l, to_l));
      rb.add(LegKind::CrossN, "enter the circle through '+' at -1", enter);
      return smooth_concat(rb.pieces);
    }
    case Region::AtMinusOne: {
      if (lab.nilpotent_sign && *lab.nilpotent_sign == '-') {
        // flows off the circle first, then re-enters
        RouteBuilder rb2(N2);
        Mat I2 = Mat::Identity(2, 2);
        std::vector<Segment> seg1 = {{kTau, I2}};
        rb2.add(LegKind::CrossN, "leave the '-' class", PositivePath(N2, seg1), false);
        PositivePath enter = prim_N(-1.0, '+', false, kTau);
        double to_l = eigen_structure(enter.origin()).groups[0].lambda.real();
        double from_l = eigen_structure(rb2.at).groups[0].lambda.real();
        if (std::abs(from_l - to_l) > 1e-12)
          rb2.add(LegKind::Slide, "slide to the re-entry class",
                  real_slide(from_l, to_l));
        rb2.add(LegKind::CrossN, "enter the circle through '+' at -1", enter);
        return smooth_concat(rb2.pieces);
      }
      // '+' class or -Id: a positive nudge moves onto the circle
      Mat I2 = Mat::Identity(2, 2);
      std::vector<Segment> seg = {{kTau, I2}};
      return PositivePath(N2, seg);
    }
    default:
      throw infeasible_error("extend_to_U: block class " +
                             std::string(to_string(lab.region)) +
                             " cannot arise on a short path");
  }
}

PositivePath extension_from(const Mat& E, int depth);

PositivePath extension_from_open(const Mat& E, const StratumLabel& lab, int depth) {
  const int d = static_cast<int>(E.rows());
  NormalForm nf = normal_form(E);
  if (d == 2) {
    PositivePath ext = block_extension(nf.N);
    return conjugate_path(ext, nf.X.inverse());
  }
  switch (lab.region) {
    case Region::O_C: {
      QuadParams cur = quad_params(E);
      ArchPlan plan = plan_arch(cur.theta, cur.logr);
      double u_end = arch_exit_time(plan, cur.theta);
      Mat W = symp_exp(plan.P, plan.u_star) * plan.N;
      std::vector<Segment> segs = {{u_end - plan.u_star, plan.P}};
      PositivePath ride(W, std::move(segs));
      RouteBuilder rb(E);
      rb.add(LegKind::Cap, "ride the excursion back onto the circle", ride);
      return smooth_concat(rb.pieces);
    }
    case Region::O_R_plus: {
      double l1 = outside_member(eigen_structure(E).groups[0].lambda.real());
      double l2 = outside_member(eigen_structure(E).groups[1].lambda.real());
      double r = std::sqrt(l1 * l2);
      PositivePath cross = prim_BR(r, Region::O_R_plus, false, kTauBR);
      RouteBuilder rb(E);
      // pull both pairs onto the crossing class before collapsing them
      Mat A = E;
      auto cls = [&](const Mat& M) {
        EigenStructure s = eigen_structure(M);
        return std::pair<double, double>(
            outside_member(s.groups[0].lambda.real()),
            outside_member(s.groups[1].lambda.real()));
      };
      EigenStructure co = eigen_structure(cross.origin());
      double t1 = outside_member(co.groups[0].lambda.real());
      double t2 = outside_member(co.groups[1].lambda.real());
      std::vector<Segment> segs;
      for (int iter = 0; iter < 120; ++iter) {
        auto [c1, c2] = cls(A);
        if (std::abs(std::log(c1 / t1)) < 1e-10 &&
            std::abs(std::log(c2 / t2)) < 1e-10)
          break;
        NormalForm nfa = normal_form(A);
        Mat Pa, Pb;
        double ha = slide_step(outside_member(nfa.N(0, 0)), t1, Pa);
        double hb = slide_step(outside_member(nfa.N(2, 2)), t2, Pb);
        double h = std::max({ha, hb, 1e-4});
        Mat P4 = blk(Mat((ha / h) * Pa), Mat((hb / h) * Pb));
        if (ha / h < 1e-9) P4.topLeftCorner(2, 2) = 1e-9 * Mat::Identity(2, 2);
        if (hb / h < 1e-9) P4.bottomRightCorner(2, 2) = 1e-9 * Mat::Identity(2, 2);
        Mat Xi = nfa.X.inverse();
        Mat P = Xi.transpose() * P4 * Xi;
        P = 0.5 * (P + P.transpose());
        segs.push_back({h, P});
        A = symp_exp(P, h) * A;
      }
      if (!segs.empty())
        rb.add(LegKind::Slide, "slide both pairs to the crossing class",
               PositivePath(E, std::move(segs)), false);
      rb.add(LegKind::CrossB_R, "collapse into the quadruplet sector", cross);
      PositivePath rest = extension_from(rb.at, depth + 1);
      rb.add(LegKind::Cap, "continue to the circle", rest, false);
      return smooth_concat(rb.pieces);
    }
    case Region::O_UR:
    case Region::O_R_minus: {
      Mat N1 = nf.N.topLeftCorner<2, 2>();
      Mat N2 = nf.N.bottomRightCorner<2, 2>();
      PositivePath ext = product4(block_extension(N1), block_extension(N2));
      return conjugate_path(ext, nf.X.inverse());
    }
    default:
      throw infeasible_error("extend_to_U: endpoint stratum " +
                             std::string(to_string(lab.region)) +
                             " cannot arise on a short path");
  }
}

PositivePath extension_from(const Mat& E, int depth) {
  if (depth > 4) throw numerical_error("extend_to_U: nudge recursion did not settle");
  StratumLabel lab = classify(E);
  const int d = static_cast<int>(E.rows());
  bool circle_only = lab.region == Region::O_U || lab.region == Region::O_U_plus ||
                     lab.region == Region::O_U_minus;
  if (circle_only) return PositivePath(E, {});
  if (!lab.open_stratum()) {
    // on a boundary: a short positive nudge moves into an open stratum; the
    // identity generator is transversal everywhere except B_R, which needs
    // the off-diagonal crossing generator in the normal-form frame
    Mat P = Mat::Identity(d, d);
    if (lab.region == Region::B_R) {
      Mat Xi = normal_form(E).X.inverse();
      P = Xi.transpose() * br_cross_P() * Xi;
      P = 0.5 * (P + P.transpose());
    }
    std::vector<Segment> seg = {{0.02, P}};
    PositivePath nudge(E, seg);
    PositivePath rest = extension_from(nudge.endpoint(), depth + 1);
    if (rest.segments().empty()) return nudge;
    return smooth_concat({nudge, rest});
  }
  return extension_from_open(E, lab, depth);
}

}  // namespace

Route extend_to_U(const PositivePath& path) {
  const int d = path.dim();
  if (d != 2 && d != 4) throw dimension_error("extend_to_U: only dims 2 and 4");
  if (!is_short(path))
    throw infeasible_error("extend_to_U: the input path is not short");
  PositivePath ext = extension_from(path.endpoint(), 0);
  Route r;
  if (ext.segments().empty()) {
    r.path = path;
    r.margin = verify_positive(path).margin;
    return r;
  }
  RouteLeg leg;
  leg.kind = LegKind::Cap;
  leg.detail = "extension to the circle-only stratum";
  leg.t0 = path.duration();
  leg.t1 = path.duration() + ext.duration();
  r.legs.push_back(leg);
  r.path = smooth_concat({path, ext});
  r.margin = verify_positive(r.path).margin;
  StratumLabel endlab = classify(r.path.endpoint());
  bool ok = endlab.region == Region::O_U || endlab.region == Region::O_U_plus ||
            endlab.region == Region::O_U_minus;
  if (!ok || !is_short(r.path))
    throw numerical_error("extend_to_U: extension failed verification");
  return r;
}

}  // namespace sympos
