#include "sympos/selftest.hpp"

#include "sympos/json_io.hpp"
#include "sympos/stability.hpp"
#include "sympos/steering.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace sympos::selftest {

namespace {

constexpr double kPi = std::numbers::pi;

Mat br_drive_P() {
  Mat P(4, 4);
  P << 1, 0, 0, -2, 0, 5, 0, 0, 0, 0, 1, 0, -2, 0, 0, 5;
  return P;
}

Mat random_sym(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat S(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) S(i, j) = S(j, i) = n(rng);
  return S;
}

Mat scaled_spd(std::mt19937_64& rng, int d, double lam_max) {
  Mat P = random_spd(rng, d, 0.8);
  double top = Eigen::SelfAdjointEigenSolver<Mat>(P).eigenvalues().maxCoeff();
  return P * (lam_max / top);
}

// positive path from the identity with total angular budget below the bound
PositivePath random_id_path(std::mt19937_64& rng, int d, double budget_lo,
                            double budget_hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int nseg = 2 + static_cast<int>(u(rng) * 2);
  std::vector<double> w(nseg);
  double tot = 0.0;
  for (double& x : w) tot += (x = 0.2 + u(rng));
  double budget = budget_lo + (budget_hi - budget_lo) * u(rng);
  std::vector<Segment> segs;
  for (int k = 0; k < nseg; ++k) {
    double dur = w[k] / tot;  // durations sum to one period
    double lam = budget * (0.5 + u(rng));
    segs.push_back({dur, scaled_spd(rng, d, lam)});
  }
  // rescale so the worst-case angular travel equals the budget
  double travel = 0.0;
  for (auto& s : segs)
    travel += s.duration *
              Eigen::SelfAdjointEigenSolver<Mat>(s.P).eigenvalues().maxCoeff();
  for (auto& s : segs) s.P *= budget / travel;
  return PositivePath(Mat::Identity(d, d), std::move(segs));
}

double full_angle_dim2(const StratumLabel& lab, const EigenStructure& es) {
  double a = std::arg(es.groups[0].lambda);  // representative in [0, pi]
  if (a < 0) a += 2.0 * kPi;
  return lab.region == Region::O_U_minus ? 2.0 * kPi - a : a;
}

bool region_is_circle_only(Region r) {
  return r == Region::O_U || r == Region::O_U_plus || r == Region::O_U_minus;
}

CheckResult timed(const std::string& name, const std::function<void(CheckResult&)>& body) {
  CheckResult res;
  res.name = name;
  auto t0 = std::chrono::steady_clock::now();
  try {
    res.pass = true;
    body(res);
  } catch (const std::exception& e) {
    res.pass = false;
    res.detail = std::string("exception: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

void require(CheckResult& res, bool cond, const std::string& msg) {
  if (!cond && res.pass) {
    res.pass = false;
    res.detail = msg;
  }
}

// ---- check bodies ----

void check_krein_closed_form(CheckResult& res) {
  CVec v(2);
  v << cplx(1, 0), cplx(0, -1);
  cplx beta = krein_form(v, v);
  require(res, std::abs(beta - cplx(2, 0)) <= 1e-12,
          "beta((1,-i),(1,-i)) = " + format_double(beta.real()));
  Mat R = rep_rotation(kPi / 2);
  int sp = splitting_number(R, cplx(0, 1));
  int sm = splitting_number(R, cplx(0, -1));
  require(res, sp == 1, "splitting at i: " + std::to_string(sp));
  require(res, sm == -1, "splitting at -i: " + std::to_string(sm));
  if (res.pass) res.detail = "beta = 2, splittings (+1, -1)";
}

void check_bifurcation_rate(CheckResult& res) {
  const Mat P = br_drive_P();
  const Mat J = standard_J(4);
  const double h = 1e-5;
  std::ostringstream d;
  for (double alpha : {1.0, -1.0}) {
    Mat A = rep_real_double(2.0, alpha);
    auto disc_lin = [&](double t) {
      Mat M = (Mat::Identity(4, 4) + t * J * P) * A;
      SymFuncs s = sym_funcs(M);
      return s.sigma2 - s.sigma1 * s.sigma1 / 4.0;
    };
    double rate = (disc_lin(h) - disc_lin(-h)) / (2.0 * h);
    double want = -2.25 * alpha;
    require(res, std::abs(rate - want) <= 1e-4,
            "rate at alpha=" + format_double(alpha) + ": " + format_double(rate));
    PositivePath path(A, {{2e-3, P}});
    Trajectory traj = eigen_trajectory(path, 64);
    require(res, !traj.itinerary.empty(), "no itinerary");
    Region last = traj.itinerary.back().label.region;
    Region want_region = alpha < 0 ? Region::O_C : Region::O_R_plus;
    require(res, last == want_region,
            std::string("alpha=") + format_double(alpha) + " entered " + to_string(last));
    d << "alpha=" << alpha << " rate=" << format_double(rate) << " -> "
      << to_string(last) << "  ";
  }
  if (res.pass) res.detail = d.str();
}

void check_parity_gate(CheckResult& res) {
  bool threw = false;
  std::string msg;
  try {
    short_path_to(rep_real(2.0));
  } catch (const infeasible_error& e) {
    threw = true;
    msg = e.what();
  }
  require(res, threw, "diag(2,1/2) did not throw");
  require(res, msg.find("parity") != std::string::npos,
          "error does not name the parity rule: " + msg);

  Mat B = blk(rep_real(2.0), rep_real(3.0));
  Route r = short_path_to(B);
  PositivityReport pos = verify_positive(r.path);
  require(res, pos.positive && pos.margin > 0,
          "route not positive, margin " + format_double(pos.margin));
  require(res, r.endpoint_residual <= 1e-6,
          "endpoint residual " + format_double(r.endpoint_residual));
  require(res, is_short(r.path), "route to diag(2,1/2,3,1/3) is not short");
  if (res.pass)
    res.detail = "margin " + format_double(pos.margin) + ", residual " +
                 format_double(r.endpoint_residual);
}

void check_extend_to_circle(CheckResult& res) {
  std::mt19937_64 rng(401);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int done = 0;
  for (int cls = 0; cls < 3 && res.pass; ++cls) {
    for (int i = 0; i < 25 && res.pass; ++i) {
      Mat Z = random_symplectic(rng, 2, 0.5);
      Mat N;
      if (cls == 0) {
        double r = 1.1 + 0.6 * u(rng), th = 0.4 + 2.3 * u(rng);
        N = rep_quadruplet(std::polar(r, th));
      } else if (cls == 1) {
        double a = 1.2 + u(rng), b = a + 0.2 + u(rng);
        N = blk(rep_real(-a), rep_real(-b));
      } else {
        double th = 0.4 + 2.3 * u(rng), a = 1.2 + u(rng);
        N = blk(rep_rotation(th), rep_real(-a));
      }
      Mat B = conjugate(N, Z);
      Route route = short_path_to(B);
      Route ext = extend_to_U(route.path);
      StratumLabel end = classify(ext.path.endpoint());
      require(res, end.region == Region::O_U,
              std::string("class ") + std::to_string(cls) + " case " +
                  std::to_string(i) + " ended in " + to_string(end.region));
      ++done;
    }
  }
  if (res.pass) res.detail = std::to_string(done) + " extensions ended in O_U";
}

void check_dim2_suite(CheckResult& res) {
  std::mt19937_64 rng(777);
  int violations = 0;
  std::string first;
  for (int i = 0; i < 300; ++i) {
    PositivePath p = random_id_path(rng, 2, 2.5, 5.6);
    Trajectory traj = eigen_trajectory(p, 256);
    auto flag = [&](const std::string& what) {
      ++violations;
      if (first.empty()) first = "path " + std::to_string(i) + ": " + what;
    };
    if (!is_short(p)) flag("not short");
    const Region kFirstWant = Region::O_U_plus;
    bool found_open = false;
    for (const auto& iv : traj.itinerary) {
      if (!iv.label.open_stratum()) continue;
      if (iv.label.region != kFirstWant) flag("first open stratum is " +
                                              std::string(to_string(iv.label.region)));
      found_open = true;
      break;
    }
    if (!found_open) flag("no open stratum");
    for (const auto& iv : traj.itinerary)
      if (iv.label.region == Region::O_R_plus) {
        flag("visited O_R_plus");
        break;
      }
    double prev_theta = -1.0;
    for (const auto& s : traj.samples) {
      StratumLabel lab = classify(p.evaluate(s.t));
      if (lab.region != Region::O_U_plus && lab.region != Region::O_U_minus)
        continue;
      double th = full_angle_dim2(lab, s.es);
      if (prev_theta >= 0 && th < prev_theta - 1e-7) {
        flag("angle decreased: " + format_double(prev_theta) + " -> " +
             format_double(th));
        break;
      }
      prev_theta = th;
    }
    AuditReport audit = audit_itinerary(traj);
    if (!audit.legal) flag("illegal crossing: " + audit.violation);
  }
  require(res, violations == 0,
          std::to_string(violations) + " violations; first: " + first);
  if (res.pass) res.detail = "300 paths, 0 violations";
}

void check_krein_monotonicity(CheckResult& res) {
  std::mt19937_64 rng(6021);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0, departures = 0;
  std::string first;
  for (int i = 0; i < 200; ++i) {
    double th1 = 0.3 + 2.0 * u(rng);
    double th2 = th1 + 0.15 + 0.35 * u(rng);
    Mat Z = random_symplectic(rng, 2, 0.6);
    Mat origin = conjugate(blk(rep_rotation(th1), rep_rotation(th2)), Z);
    std::vector<Segment> segs;
    for (int k = 0; k < 2; ++k) {
      double lam = 1.0 + 2.0 * u(rng);
      segs.push_back({0.6 / lam, scaled_spd(rng, 4, lam)});
    }
    PositivePath p(origin, std::move(segs));
    Trajectory traj = eigen_trajectory(p, 256);
    auto flag = [&](const std::string& what) {
      ++violations;
      if (first.empty()) first = "path " + std::to_string(i) + ": " + what;
    };
    for (size_t s = 1; s < traj.samples.size(); ++s) {
      const auto& a = traj.samples[s - 1];
      const auto& b = traj.samples[s];
      for (size_t ga = 0; ga < a.es.groups.size(); ++ga) {
        if (ga >= a.track.size()) continue;
        int id = a.track[ga];
        int gb = -1;
        for (size_t j = 0; j < b.es.groups.size() && j < b.track.size(); ++j)
          if (b.track[j] == id) gb = static_cast<int>(j);
        if (gb < 0) continue;
        const auto& A = a.es.groups[ga];
        const auto& B = b.es.groups[gb];
        if (A.kind != GroupKind::CirclePair || B.kind != GroupKind::CirclePair)
          continue;
        if (!A.splitting || !B.splitting || *A.splitting != *B.splitting)
          continue;
        if (std::abs(*A.splitting) != 1) continue;
        double da = std::arg(B.lambda) - std::arg(A.lambda);
        if (*A.splitting * da < -1e-6) {
          flag("splitting " + std::to_string(*A.splitting) + " moved by " +
               format_double(da));
        }
      }
    }
    for (const auto& c : traj.crossings) {
      if (!region_is_circle_only(c.from)) continue;
      StratumLabel to_lab;
      to_lab.region = c.to;
      if (!to_lab.off_circle() && c.to != Region::O_UR) continue;
      ++departures;
      if (std::abs(c.where.imag()) < 0.1) continue;  // +-1 collisions: automatic
      const TrajectorySample* last = nullptr;
      for (const auto& s : traj.samples)
        if (s.t < c.t - 1e-9) last = &s;
      if (!last) continue;
      // the two circle groups nearest the collision angle must cancel
      std::vector<std::pair<double, int>> near;
      for (const auto& g : last->es.groups)
        if (g.kind == GroupKind::CirclePair && g.splitting)
          near.push_back({std::abs(std::arg(g.lambda) - std::arg(c.where)),
                          *g.splitting});
      if (near.size() < 2) continue;
      std::sort(near.begin(), near.end());
      if (near[0].second + near[1].second != 0)
        flag("departure at t=" + format_double(c.t) + " with splittings " +
             std::to_string(near[0].second) + "," + std::to_string(near[1].second));
    }
  }
  require(res, violations == 0,
          std::to_string(violations) + " violations; first: " + first);
  require(res, departures >= 1, "no departure events observed");
  if (res.pass)
    res.detail = "200 paths, " + std::to_string(departures) + " departures, 0 violations";
}

void check_strong_stability(CheckResult& res) {
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double eps = 0.01;
  int agree = 0;
  for (int i = 0; i < 50; ++i) {
    Mat Z = random_symplectic(rng, 2, 0.5);
    Mat M;
    bool expect_strong = i % 2 == 0;
    if (expect_strong) {
      double th1 = 0.35 + 0.9 * u(rng);
      double th2 = th1 + 0.35 + 0.9 * u(rng);  // distinct, off +-1, no resonance
      M = conjugate(blk(rep_rotation(th1), rep_rotation(th2)), Z);
    } else if (i % 4 == 1) {
      double th = 0.4 + 2.2 * u(rng);  // mixed-splitting double pair
      M = conjugate(blk(rep_rotation(th), rep_rotation(2.0 * kPi - th)), Z);
    } else {
      M = -Mat::Identity(4, 4);
    }
    require(res, is_stable(M), "test matrix " + std::to_string(i) + " not stable");
    bool strong = is_strongly_stable(M);
    require(res, strong == expect_strong,
            "matrix " + std::to_string(i) + ": is_strongly_stable = " +
                (strong ? "true" : "false"));
    bool found_unstable = false;
    std::mt19937_64 prng(1000 + i);
    for (int k = 0; k < 1000 && !found_unstable; ++k) {
      Mat Q = random_sym(prng, 4);
      Mat Mp = symp_exp(Q, eps) * M;
      if (!is_stable(Mp)) found_unstable = true;
    }
    if (strong)
      require(res, !found_unstable,
              "strongly stable matrix " + std::to_string(i) + " destabilized");
    else
      require(res, found_unstable,
              "no destabilizing perturbation for matrix " + std::to_string(i));
    if (res.pass) ++agree;
  }
  if (res.pass) res.detail = std::to_string(agree) + "/50 agree with sampling";
}

void check_critical_mu(CheckResult& res) {
  PeriodicSystem one({{1.0, Mat::Identity(4, 4)}});
  PeriodicSystem two({{1.0, 2.0 * Mat::Identity(4, 4)}});
  double mu1 = critical_mu(one);
  double mu2 = critical_mu(two);
  require(res, std::abs(mu1 - kPi) <= 1e-8, "mu0(Id) = " + format_double(mu1));
  require(res, std::abs(mu2 - kPi / 2) <= 1e-8, "mu0(2 Id) = " + format_double(mu2));
  for (double c : {0.1, 0.5, 0.9}) {
    require(res, is_strongly_stable(monodromy(one, c * mu1)),
            "Id system not strongly stable at " + format_double(c) + " mu0");
    require(res, is_strongly_stable(monodromy(two, c * mu2)),
            "2 Id system not strongly stable at " + format_double(c) + " mu0");
  }
  if (res.pass)
    res.detail = "mu0 = " + format_double(mu1) + ", " + format_double(mu2);
}

void check_excursion_bounds(CheckResult& res) {
  std::mt19937_64 rng(9090);
  int short_ok = 0, index_ok = 0, attempts = 0;
  std::string first;
  while (short_ok < 200 && attempts < 4000 && res.pass) {
    ++attempts;
    PositivePath p = random_id_path(rng, 4, 2.5, 5.8);
    ExcursionReport r = excursion_index_check(p);
    if (!r.short_path || !r.stable_endpoint) continue;
    require(res, r.ok_short_bound,
            "short stable path with e = " + std::to_string(r.excursions));
    ++short_ok;
  }
  require(res, short_ok == 200,
          "only " + std::to_string(short_ok) + " short stable paths in " +
              std::to_string(attempts) + " attempts");
  attempts = 0;
  while (index_ok < 200 && attempts < 4000 && res.pass) {
    ++attempts;
    PositivePath p = random_id_path(rng, 4, 2.5, 9.0);
    ExcursionReport r = excursion_index_check(p);
    if (!r.stable_endpoint) continue;
    require(res, r.ok_index_bound,
            "e = " + std::to_string(r.excursions) + " > i + 1 = " +
                std::to_string(r.index + 1));
    ++index_ok;
  }
  require(res, index_ok == 200,
          "only " + std::to_string(index_ok) + " stable paths in " +
              std::to_string(attempts) + " attempts");
  if (res.pass) res.detail = "200 short-stable + 200 stable paths within bounds";
}

void check_conservation_and_rotation(CheckResult& res) {
  PositivePath rot(Mat::Identity(2, 2), {{2.0 * kPi + 0.5, Mat::Identity(2, 2)}});
  CzReport cz = conley_zehnder_index(rot);
  require(res, cz.index == 2, "CZ of the rotation path: " + std::to_string(cz.index));
  double worst = eigen_trajectory(rot, 256).max_symp_residual;
  std::mt19937_64 rng(12);
  for (int i = 0; i < 10; ++i) {
    for (int d : {2, 4}) {
      PositivePath p = random_id_path(rng, d, 2.0, 6.0);
      worst = std::max(worst, eigen_trajectory(p, 128).max_symp_residual);
    }
  }
  require(res, worst <= 1e-8, "worst symplectic residual " + format_double(worst));
  if (res.pass)
    res.detail = "CZ = 2, worst residual " + format_double(worst);
}

}  // namespace

std::vector<std::pair<std::string, Check>> checks() {
  auto mk = [](const std::string& name, void (*body)(CheckResult&)) {
    return std::make_pair(name, Check([name, body]() { return timed(name, body); }));
  };
  return {
      mk("krein-splitting-closed-form", check_krein_closed_form),
      mk("real-double-bifurcation-rate", check_bifurcation_rate),
      mk("parity-gate", check_parity_gate),
      mk("extend-to-circle", check_extend_to_circle),
      mk("dim2-path-suite", check_dim2_suite),
      mk("krein-monotonicity", check_krein_monotonicity),
      mk("strong-stability-sampling", check_strong_stability),
      mk("critical-parameter", check_critical_mu),
      mk("excursion-bounds", check_excursion_bounds),
      mk("conservation-and-rotation-index", check_conservation_and_rotation),
  };
}

int run_all(std::ostream& out) {
  int failures = 0;
  for (auto& [name, check] : checks()) {
    CheckResult r = check();
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " ("
        << format_double(r.seconds) << "s)";
    if (!r.detail.empty()) out << ": " << r.detail;
    out << "\n";
    out.flush();
    if (!r.pass) ++failures;
  }
  return failures;
}

}  // namespace sympos::selftest
