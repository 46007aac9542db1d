#include "sympos/json_io.hpp"
#include "sympos/selftest.hpp"
#include "sympos/stability.hpp"
#include "sympos/steering.hpp"
#include "sympos/svg.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace sympos;

void emit(const std::string& text, const std::string& out_file) {
  if (out_file.empty())
    std::cout << text;
  else
    atomic_write(out_file, text);
}

json stability_report(const Mat& A, double tol_circle) {
  json j;
  j["stable"] = is_stable(A, tol_circle);
  j["strongly_stable"] = is_strongly_stable(A, tol_circle);
  j["structure"] = eigen_structure_to_json(eigen_structure(A, tol_circle));
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{"positive paths in the real symplectic group"};
  app.require_subcommand(1);

  std::string in_file, out_file, svg_file, a_file, b_file, sys_file;
  int samples = 512;
  int steps = 100;
  long seed = 0;
  double tol_circle = kCircleTol;
  double mu = 1.0;
  double mu_max = 10.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--tol-circle", tol_circle, "unit-circle snap tolerance");
    cmd->add_option("--samples", samples, "trajectory sample count");
    cmd->add_option("--seed", seed, "seed for randomized internals");
  };

  auto* c_classify = app.add_subcommand("classify", "stratum of a symplectic matrix");
  c_classify->add_option("-i,--input", in_file, "matrix JSON file")->required();
  add_common(c_classify);

  auto* c_trace = app.add_subcommand("trace", "eigenvalue trajectory of a path");
  c_trace->add_option("-i,--input", in_file, "path JSON file")->required();
  c_trace->add_option("-o,--output", out_file, "CSV output file (default stdout)");
  c_trace->add_option("--svg", svg_file, "also write a static SVG plot");
  add_common(c_trace);

  auto* c_connect = app.add_subcommand(
      "connect", "positive path to a target; without -a, a short path from the identity");
  c_connect->add_option("-a,--from", a_file, "start matrix JSON (optional)");
  c_connect->add_option("-b,--to", b_file, "target matrix JSON")->required();
  c_connect->add_option("-o,--output", out_file, "path JSON output (default stdout)");
  add_common(c_connect);

  auto* c_extend = app.add_subcommand("extend",
                                      "extend a short path into the circle stratum");
  c_extend->add_option("-i,--input", in_file, "path JSON file")->required();
  c_extend->add_option("-o,--output", out_file, "path JSON output (default stdout)");
  add_common(c_extend);

  auto* c_index = app.add_subcommand("index", "path diagnostics and index report");
  c_index->add_option("-i,--input", in_file, "path JSON file")->required();
  add_common(c_index);

  auto* c_stab = app.add_subcommand("stability", "stability of a matrix or system");
  c_stab->add_option("-i,--input", in_file, "matrix JSON file");
  c_stab->add_option("-s,--system", sys_file, "periodic system JSON file");
  c_stab->add_option("--mu", mu, "system scale parameter");
  add_common(c_stab);

  auto* c_sweep = app.add_subcommand("sweep", "critical parameter and mu-grid table");
  c_sweep->add_option("-s,--system", sys_file, "periodic system JSON file")->required();
  c_sweep->add_option("-o,--output", out_file, "CSV output file")->required();
  c_sweep->add_option("--mu-max", mu_max, "scan ceiling");
  c_sweep->add_option("--steps", steps, "grid rows in the table");
  add_common(c_sweep);

  auto* c_self = app.add_subcommand("selftest", "run the acceptance suite");
  (void)c_self;

  CLI11_PARSE(app, argc, argv);
  (void)seed;

  if (c_classify->parsed()) {
    Mat A = matrix_from_json(load_json(in_file));
    std::cout << stratum_to_json(classify(A, tol_circle)).dump() << "\n";
    return 0;
  }

  if (c_trace->parsed()) {
    PositivePath path = path_from_json(load_json(in_file));
    Trajectory traj = eigen_trajectory(path, samples, tol_circle);
    emit(trajectory_to_csv(traj), out_file);
    if (!svg_file.empty()) atomic_write(svg_file, trajectory_to_svg(traj));
    if (!out_file.empty()) {
      json j;
      j["samples"] = traj.samples.size();
      j["crossings"] = traj.crossings.size();
      j["max_symp_residual"] = traj.max_symp_residual;
      std::cout << j.dump() << "\n";
    }
    return 0;
  }

  if (c_connect->parsed()) {
    Mat B = matrix_from_json(load_json(b_file));
    Route route = a_file.empty()
                      ? short_path_to(B)
                      : connect(matrix_from_json(load_json(a_file)), B);
    std::string text = path_to_json(route.path).dump() + "\n";
    emit(text, out_file);
    if (!out_file.empty()) {
      json j;
      j["endpoint_residual"] = route.endpoint_residual;
      j["margin"] = route.margin;
      j["duration"] = route.path.duration();
      j["legs"] = route.legs.size();
      std::cout << j.dump() << "\n";
    }
    return 0;
  }

  if (c_extend->parsed()) {
    PositivePath path = path_from_json(load_json(in_file));
    Route route = extend_to_U(path);
    std::string text = path_to_json(route.path).dump() + "\n";
    emit(text, out_file);
    if (!out_file.empty()) {
      json j;
      j["margin"] = route.margin;
      j["duration"] = route.path.duration();
      std::cout << j.dump() << "\n";
    }
    return 0;
  }

  if (c_index->parsed()) {
    PositivePath path = path_from_json(load_json(in_file));
    std::cout << diagnostics_to_json(diagnose(path, samples)).dump() << "\n";
    return 0;
  }

  if (c_stab->parsed()) {
    if (in_file.empty() == sys_file.empty())
      throw dimension_error("stability: give exactly one of --input or --system");
    Mat A = in_file.empty()
                ? monodromy(system_from_json(load_json(sys_file)), mu)
                : matrix_from_json(load_json(in_file));
    std::cout << stability_report(A, tol_circle).dump() << "\n";
    return 0;
  }

  if (c_sweep->parsed()) {
    PeriodicSystem sys = system_from_json(load_json(sys_file));
    double mu0 = critical_mu(sys, mu_max);
    std::string csv = "mu,stable,strongly_stable\n";
    for (int k = 0; k <= steps; ++k) {
      double m = mu_max * k / steps;
      Mat M = monodromy(sys, m);
      csv += format_double(m);
      csv += is_stable(M, tol_circle) ? ",1" : ",0";
      csv += is_strongly_stable(M, tol_circle) ? ",1\n" : ",0\n";
    }
    emit(csv, out_file);
    json j;
    j["critical_mu"] = mu0;
    std::cout << j.dump() << "\n";
    return 0;
  }

  if (c_self->parsed()) {
    int failures = sympos::selftest::run_all(std::cout);
    return failures ? 4 : 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const sympos::infeasible_error& e) {
    std::cerr << R"({"error":")" << e.what() << R"(","code":3})" << "\n";
    return 3;
  } catch (const sympos::unsupported_error& e) {
    std::cerr << R"({"error":")" << e.what() << R"(","code":3})" << "\n";
    return 3;
  } catch (const sympos::numerical_error& e) {
    std::cerr << R"({"error":")" << e.what() << R"(","code":4})" << "\n";
    return 4;
  } catch (const sympos::dimension_error& e) {
    std::cerr << R"({"error":")" << e.what() << R"(","code":2})" << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << R"({"error":")" << e.what() << R"(","code":2})" << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << R"({"error":")" << e.what() << R"(","code":4})" << "\n";
    return 4;
  }
}
