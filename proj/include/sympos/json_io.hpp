#pragma once

#include "sympos/stability.hpp"
#include "sympos/steering.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace sympos {

using json = nlohmann::json;

// Matrix files: {"dim": 2n, "rows": [[...], ...]}.
json matrix_to_json(const Mat& A);
Mat matrix_from_json(const json& j);

// Generators use the same shape under key "generator_P".
json generator_to_json(const Mat& P);
Mat generator_from_json(const json& j);

// Paths: {"dim": 2n, "origin": {...}, "segments": [{"duration": d,
// "generator_P": [[...]]}]}; origin defaults to the identity.
json path_to_json(const PositivePath& path);
PositivePath path_from_json(const json& j);

// Periodic systems reuse the path schema with "periodic": true and total
// duration 1.
json system_to_json(const PeriodicSystem& sys);
PeriodicSystem system_from_json(const json& j);

json eigen_structure_to_json(const EigenStructure& es);
json stratum_to_json(const StratumLabel& label);
json trajectory_to_json(const Trajectory& traj);
json diagnostics_to_json(const PathDiagnostics& d);
json route_to_json(const Route& r);

// Trajectory CSV: header
//   t,group,lambda_re,lambda_im,kind,splitting,stratum
// one row per tracked group per sample, UTF-8, LF line endings.
std::string trajectory_to_csv(const Trajectory& traj);

std::string format_double(double x);  // shortest round-trip decimal

// Writes via a temp file in the same directory plus rename.
void atomic_write(const std::filesystem::path& target, const std::string& contents);

json load_json(const std::filesystem::path& file);

}  // namespace sympos
