#pragma once

#include "sympos/paths.hpp"

#include <string>

namespace sympos {

// Static SVG 1.1 plot of an eigenvalue trajectory: unit circle, tracked
// eigenvalue curves colored by kind/splitting, and a stratum timeline bar.
std::string trajectory_to_svg(const Trajectory& traj, int width = 760, int height = 560);

}  // namespace sympos
