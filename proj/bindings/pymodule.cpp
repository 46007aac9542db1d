#include "sympos/json_io.hpp"
#include "sympos/svg.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>
#include <vector>

namespace py = pybind11;
using namespace sympos;

namespace {

std::vector<Segment> to_segments(const std::vector<std::pair<double, Mat>>& raw) {
  std::vector<Segment> segs;
  segs.reserve(raw.size());
  for (const auto& [d, P] : raw) segs.push_back({d, P});
  return segs;
}

py::dict stratum_dict(const StratumLabel& lab) {
  py::dict d;
  d["region"] = std::string(to_string(lab.region));
  d["nilpotent_sign"] =
      lab.nilpotent_sign ? py::object(py::str(std::string(1, *lab.nilpotent_sign)))
                         : py::object(py::none());
  py::list labels;
  for (cplx z : lab.labels) labels.append(z);
  d["labels"] = std::move(labels);
  return d;
}

py::list group_list(const EigenStructure& es) {
  py::list out;
  for (const auto& g : es.groups) {
    py::dict d;
    d["lambda"] = g.lambda;
    d["kind"] = std::string(to_string(g.kind));
    d["mult"] = g.mult;
    d["diagonalizable"] = g.diagonalizable;
    d["splitting"] =
        g.splitting ? py::object(py::int_(*g.splitting)) : py::object(py::none());
    out.append(std::move(d));
  }
  return out;
}

py::dict route_dict(const Route& r) {
  py::dict d;
  py::list legs;
  for (const auto& leg : r.legs)
    legs.append(py::make_tuple(std::string(to_string(leg.kind)), leg.detail,
                               leg.t0, leg.t1));
  d["legs"] = std::move(legs);
  d["path"] = r.path;
  d["endpoint_residual"] = r.endpoint_residual;
  d["margin"] = r.margin;
  return d;
}

}  // namespace

PYBIND11_MODULE(_sympos, m) {
  m.doc() = "positive paths in the real symplectic group";

  py::class_<PositivePath>(m, "PositivePath")
      .def(py::init([](const Mat& origin,
                       const std::vector<std::pair<double, Mat>>& segments) {
             return PositivePath(origin, to_segments(segments));
           }),
           py::arg("origin"), py::arg("segments"))
      .def_property_readonly("dim", &PositivePath::dim)
      .def_property_readonly("duration", &PositivePath::duration)
      .def_property_readonly("origin", &PositivePath::origin)
      .def("evaluate", &PositivePath::evaluate, py::arg("t"))
      .def("endpoint", &PositivePath::endpoint)
      .def("segments",
           [](const PositivePath& p) {
             std::vector<std::pair<double, Mat>> out;
             for (const auto& s : p.segments()) out.emplace_back(s.duration, s.P);
             return out;
           })
      .def("__repr__", [](const PositivePath& p) {
        return "PositivePath(dim=" + std::to_string(p.dim()) +
               ", duration=" + format_double(p.duration()) + ")";
      });

  m.def("standard_J", &standard_J, py::arg("dim"));
  m.def("symp_exp", &symp_exp, py::arg("P"), py::arg("t"));
  m.def("is_symplectic",
        [](const Mat& A, double tol) { return is_symplectic(A, tol).ok; },
        py::arg("A"), py::arg("tol") = kSympTol);

  m.def("classify",
        [](const Mat& A, double tol) { return stratum_dict(classify(A, tol)); },
        py::arg("A"), py::arg("tol_circle") = kCircleTol);
  m.def("region",
        [](const Mat& A, double tol) {
          return std::string(to_string(classify(A, tol).region));
        },
        py::arg("A"), py::arg("tol_circle") = kCircleTol);
  m.def("eigen_groups",
        [](const Mat& A, double tol) {
          return group_list(eigen_structure(A, tol));
        },
        py::arg("A"), py::arg("tol_circle") = kCircleTol);
  m.def("normal_form",
        [](const Mat& A) {
          NormalForm nf = normal_form(A);
          return py::make_tuple(nf.X, nf.N, nf.residual);
        },
        py::arg("A"));

  m.def("verify_positive",
        [](const PositivePath& p) {
          PositivityReport rep = verify_positive(p);
          return py::make_tuple(rep.positive, rep.margin);
        },
        py::arg("path"));
  m.def("conley_zehnder_index",
        [](const PositivePath& p, int samples) {
          return conley_zehnder_index(p, samples).index;
        },
        py::arg("path"), py::arg("samples") = 2048);
  m.def("is_short",
        [](const PositivePath& p, int samples) { return is_short(p, samples); },
        py::arg("path"), py::arg("samples") = 2048);
  m.def("excursions",
        [](const PositivePath& p, double s, int samples) {
          return excursions(p, s, samples);
        },
        py::arg("path"), py::arg("s"), py::arg("samples") = 512);
  m.def("itinerary",
        [](const PositivePath& p, int samples) {
          Trajectory traj = eigen_trajectory(p, samples);
          py::list out;
          for (const auto& iv : traj.itinerary)
            out.append(py::make_tuple(iv.t0, iv.t1,
                                      std::string(to_string(iv.label.region))));
          return out;
        },
        py::arg("path"), py::arg("samples") = 512);

  m.def("connect",
        [](const Mat& A, const Mat& B) { return route_dict(connect(A, B)); },
        py::arg("A"), py::arg("B"));
  m.def("short_path_to",
        [](const Mat& B) { return route_dict(short_path_to(B)); }, py::arg("B"));
  m.def("extend_to_U",
        [](const PositivePath& p) { return route_dict(extend_to_U(p)); },
        py::arg("path"));

  m.def("monodromy",
        [](const std::vector<std::pair<double, Mat>>& segments, double mu) {
          return monodromy(PeriodicSystem(to_segments(segments)), mu);
        },
        py::arg("segments"), py::arg("mu"));
  m.def("is_stable",
        [](const Mat& A, double tol) { return is_stable(A, tol); }, py::arg("A"),
        py::arg("tol_circle") = kCircleTol);
  m.def("is_strongly_stable",
        [](const Mat& A, double tol) { return is_strongly_stable(A, tol); },
        py::arg("A"), py::arg("tol_circle") = kCircleTol);
  m.def("critical_mu",
        [](const std::vector<std::pair<double, Mat>>& segments, double mu_max) {
          return critical_mu(PeriodicSystem(to_segments(segments)), mu_max);
        },
        py::arg("segments"), py::arg("mu_max") = 10.0);
}
