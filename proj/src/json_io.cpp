#include "sympos/json_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace sympos {

namespace {

json rows_to_json(const Mat& A) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat rows_from_json(const json& rows, const char* who) {
  if (!rows.is_array() || rows.empty())
    throw dimension_error(std::string(who) + ": expected an array of rows");
  const auto n = rows.size();
  Mat A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < n; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || row.size() != n)
      throw dimension_error(std::string(who) + ": rows must form a square matrix");
    for (size_t j = 0; j < n; ++j)
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          row[j].get<double>();
  }
  return A;
}

json label_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

}  // namespace

json matrix_to_json(const Mat& A) {
  json j;
  j["dim"] = A.rows();
  j["rows"] = rows_to_json(A);
  return j;
}

Mat matrix_from_json(const json& j) {
  Mat A = rows_from_json(j.at("rows"), "matrix_from_json");
  if (j.contains("dim") && j["dim"].get<Eigen::Index>() != A.rows())
    throw dimension_error("matrix_from_json: dim does not match the rows");
  return A;
}

json generator_to_json(const Mat& P) {
  json j;
  j["dim"] = P.rows();
  j["generator_P"] = rows_to_json(P);
  return j;
}

Mat generator_from_json(const json& j) {
  Mat P = rows_from_json(j.at("generator_P"), "generator_from_json");
  if (j.contains("dim") && j["dim"].get<Eigen::Index>() != P.rows())
    throw dimension_error("generator_from_json: dim does not match the rows");
  return P;
}

json path_to_json(const PositivePath& path) {
  json j;
  j["dim"] = path.dim();
  j["origin"] = matrix_to_json(path.origin());
  json segs = json::array();
  for (const auto& s : path.segments()) {
    json seg;
    seg["duration"] = s.duration;
    seg["generator_P"] = rows_to_json(s.P);
    segs.push_back(std::move(seg));
  }
  j["segments"] = std::move(segs);
  return j;
}

namespace {

std::vector<Segment> segments_from_json(const json& j, const char* who) {
  const json& arr = j.at("segments");
  if (!arr.is_array())
    throw dimension_error(std::string(who) + ": segments must be an array");
  std::vector<Segment> segs;
  for (const json& s : arr) {
    Segment seg;
    seg.duration = s.at("duration").get<double>();
    seg.P = rows_from_json(s.at("generator_P"), who);
    segs.push_back(std::move(seg));
  }
  return segs;
}

}  // namespace

PositivePath path_from_json(const json& j) {
  std::vector<Segment> segs = segments_from_json(j, "path_from_json");
  Mat origin;
  if (j.contains("origin")) {
    origin = matrix_from_json(j["origin"]);
  } else {
    Eigen::Index d = j.at("dim").get<Eigen::Index>();
    origin = Mat::Identity(d, d);
  }
  return PositivePath(origin, std::move(segs));
}

json system_to_json(const PeriodicSystem& sys) {
  json j;
  j["dim"] = sys.dim();
  j["periodic"] = true;
  json segs = json::array();
  for (const auto& s : sys.segments) {
    json seg;
    seg["duration"] = s.duration;
    seg["generator_P"] = rows_to_json(s.P);
    segs.push_back(std::move(seg));
  }
  j["segments"] = std::move(segs);
  return j;
}

PeriodicSystem system_from_json(const json& j) {
  return PeriodicSystem(segments_from_json(j, "system_from_json"));
}

json eigen_structure_to_json(const EigenStructure& es) {
  json j;
  j["dim"] = es.dim;
  j["residual"] = es.residual;
  json groups = json::array();
  for (const auto& g : es.groups) {
    json gj;
    gj["lambda_re"] = g.lambda.real();
    gj["lambda_im"] = g.lambda.imag();
    gj["kind"] = to_string(g.kind);
    gj["mult"] = g.mult;
    gj["diagonalizable"] = g.diagonalizable;
    if (g.splitting)
      gj["splitting"] = *g.splitting;
    else
      gj["splitting"] = nullptr;
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  return j;
}

json stratum_to_json(const StratumLabel& label) {
  json j;
  j["region"] = to_string(label.region);
  if (label.nilpotent_sign)
    j["nilpotent_sign"] = std::string(1, *label.nilpotent_sign);
  else
    j["nilpotent_sign"] = nullptr;
  json labels = json::array();
  for (cplx z : label.labels) labels.push_back(label_to_json(z));
  j["labels"] = std::move(labels);
  return j;
}

json trajectory_to_json(const Trajectory& traj) {
  json j;
  j["tracks"] = traj.tracks;
  j["max_symp_residual"] = traj.max_symp_residual;
  json samples = json::array();
  for (const auto& s : traj.samples) {
    json sj;
    sj["t"] = s.t;
    sj["structure"] = eigen_structure_to_json(s.es);
    sj["track"] = s.track;
    samples.push_back(std::move(sj));
  }
  j["samples"] = std::move(samples);
  json itin = json::array();
  for (const auto& iv : traj.itinerary) {
    json ij;
    ij["t0"] = iv.t0;
    ij["t1"] = iv.t1;
    ij["stratum"] = stratum_to_json(iv.label);
    itin.push_back(std::move(ij));
  }
  j["itinerary"] = std::move(itin);
  json crossings = json::array();
  for (const auto& c : traj.crossings) {
    json cj;
    cj["t"] = c.t;
    cj["from"] = to_string(c.from);
    cj["to"] = to_string(c.to);
    cj["boundary"] = to_string(c.boundary);
    if (c.sign)
      cj["sign"] = std::string(1, *c.sign);
    else
      cj["sign"] = nullptr;
    cj["where"] = label_to_json(c.where);
    crossings.push_back(std::move(cj));
  }
  j["crossings"] = std::move(crossings);
  return j;
}

json diagnostics_to_json(const PathDiagnostics& d) {
  json j;
  j["positive"] = d.positivity.positive;
  j["margin"] = d.positivity.margin;
  j["max_symp_residual"] = d.max_symp_residual;
  j["short"] = d.short_path;
  j["cz_index"] = d.cz.index;
  json cz;
  cz["index"] = d.cz.index;
  cz["eps"] = d.cz.eps;
  cz["crossing_times"] = d.cz.crossing_times;
  cz["tangency"] = d.cz.tangency;
  j["conley_zehnder"] = std::move(cz);
  j["excursions"] = d.excursions_full;
  json audit;
  audit["legal"] = d.audit.legal;
  audit["violation"] = d.audit.violation;
  j["audit"] = std::move(audit);
  return j;
}

json route_to_json(const Route& r) {
  json j;
  json legs = json::array();
  for (const auto& leg : r.legs) {
    json lj;
    lj["kind"] = to_string(leg.kind);
    lj["detail"] = leg.detail;
    lj["t0"] = leg.t0;
    lj["t1"] = leg.t1;
    legs.push_back(std::move(lj));
  }
  j["legs"] = std::move(legs);
  j["path"] = path_to_json(r.path);
  j["endpoint_residual"] = r.endpoint_residual;
  j["margin"] = r.margin;
  return j;
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::string out = "t,group,lambda_re,lambda_im,kind,splitting,stratum\n";
  auto stratum_at = [&](double t) -> std::string {
    for (const auto& iv : traj.itinerary)
      if (t >= iv.t0 && t <= iv.t1) return to_string(iv.label.region);
    return "";
  };
  for (const auto& s : traj.samples) {
    std::string stratum = stratum_at(s.t);
    for (size_t g = 0; g < s.es.groups.size(); ++g) {
      const auto& grp = s.es.groups[g];
      out += format_double(s.t);
      out += ',';
      out += std::to_string(g < s.track.size() ? s.track[g] : -1);
      out += ',';
      out += format_double(grp.lambda.real());
      out += ',';
      out += format_double(grp.lambda.imag());
      out += ',';
      out += to_string(grp.kind);
      out += ',';
      if (grp.splitting) out += std::to_string(*grp.splitting);
      out += ',';
      out += stratum;
      out += '\n';
    }
  }
  return out;
}

void atomic_write(const std::filesystem::path& target, const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path dir = target.parent_path();
  fs::path tmp = (dir.empty() ? fs::path(".") : dir) /
                 (target.filename().string() + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw numerical_error("atomic_write: cannot open " + tmp.string());
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    f.flush();
    if (!f) throw numerical_error("atomic_write: write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw numerical_error("atomic_write: rename failed: " + ec.message());
  }
}

json load_json(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw dimension_error("load_json: cannot open " + file.string());
  json j;
  f >> j;
  return j;
}

}  // namespace sympos
