#include "sympos/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

namespace sympos {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

const char* kind_color(const EigenGroup& g) {
  switch (g.kind) {
    case GroupKind::CirclePair:
      if (g.splitting && *g.splitting > 0) return "#d62728";
      if (g.splitting && *g.splitting < 0) return "#1f77b4";
      return "#7f7f7f";
    case GroupKind::RealPair: return "#2ca02c";
    case GroupKind::Quadruplet: return "#9467bd";
    case GroupKind::PlusOne: return "#ff7f0e";
    case GroupKind::MinusOne: return "#8c564b";
  }
  return "#000000";
}

const char* region_color(Region r) {
  switch (r) {
    case Region::O_U_plus:
    case Region::O_U: return "#aec7e8";
    case Region::O_U_minus: return "#c5dbf1";
    case Region::O_C: return "#c5b0d5";
    case Region::O_R_plus: return "#98df8a";
    case Region::O_R_minus: return "#d4f0c0";
    case Region::O_UR: return "#dbdb8d";
    case Region::B_U: return "#1f77b4";
    case Region::B_R: return "#2ca02c";
    case Region::B_UR: return "#17becf";
    case Region::B_RU: return "#bcbd22";
    case Region::AtPlusOne: return "#ff7f0e";
    case Region::AtMinusOne: return "#8c564b";
    case Region::NonGeneric: return "#e377c2";
  }
  return "#cccccc";
}

}  // namespace

std::string trajectory_to_svg(const Trajectory& traj, int width, int height) {
  const int bar_h = 28;
  const int pad = 12;
  const double plot_w = width - 2 * pad;
  const double plot_h = height - 3 * pad - bar_h;

  double radius = 1.0;
  for (const auto& s : traj.samples)
    for (const auto& g : s.es.groups)
      radius = std::max(radius, std::abs(g.lambda));
  radius *= 1.15;

  const double cx = pad + plot_w / 2.0;
  const double cy = pad + plot_h / 2.0;
  const double scale = std::min(plot_w, plot_h) / (2.0 * radius);
  auto X = [&](double re) { return cx + scale * re; };
  auto Y = [&](double im) { return cy - scale * im; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
         std::to_string(height) + "\" fill=\"white\"/>\n";

  // axes and the unit circle
  svg += "<line x1=\"" + num(X(-radius)) + "\" y1=\"" + num(cy) + "\" x2=\"" +
         num(X(radius)) + "\" y2=\"" + num(cy) +
         "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + num(cx) + "\" y1=\"" + num(Y(radius)) + "\" x2=\"" +
         num(cx) + "\" y2=\"" + num(Y(-radius)) +
         "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
  svg += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(scale) +
         "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1\"/>\n";

  // eigenvalue curves, one polyline piece per sample step and track,
  // colored by the group kind at the step's start
  std::map<int, std::pair<double, double>> prev;  // track -> last position
  std::map<int, const char*> prev_color;
  for (const auto& s : traj.samples) {
    for (size_t g = 0; g < s.es.groups.size(); ++g) {
      int track = g < s.track.size() ? s.track[g] : static_cast<int>(g);
      const auto& grp = s.es.groups[g];
      double x = X(grp.lambda.real());
      double y = Y(grp.lambda.imag());
      auto it = prev.find(track);
      if (it != prev.end()) {
        svg += "<line x1=\"" + num(it->second.first) + "\" y1=\"" +
               num(it->second.second) + "\" x2=\"" + num(x) + "\" y2=\"" + num(y) +
               "\" stroke=\"" + prev_color[track] +
               "\" stroke-width=\"1.5\" stroke-linecap=\"round\"/>\n";
      }
      prev[track] = {x, y};
      prev_color[track] = kind_color(grp);
    }
  }
  // start markers
  if (!traj.samples.empty()) {
    const auto& s0 = traj.samples.front();
    for (size_t g = 0; g < s0.es.groups.size(); ++g) {
      const auto& grp = s0.es.groups[g];
      svg += "<circle cx=\"" + num(X(grp.lambda.real())) + "\" cy=\"" +
             num(Y(grp.lambda.imag())) + "\" r=\"3\" fill=\"" + kind_color(grp) +
             "\"/>\n";
    }
  }

  // stratum timeline bar
  double T = traj.samples.empty() ? 0.0 : traj.samples.back().t;
  const double bar_y = height - pad - bar_h;
  if (T > 0 && !traj.itinerary.empty()) {
    for (const auto& iv : traj.itinerary) {
      double x0 = pad + plot_w * iv.t0 / T;
      double x1 = pad + plot_w * iv.t1 / T;
      svg += "<rect x=\"" + num(x0) + "\" y=\"" + num(bar_y) + "\" width=\"" +
             num(std::max(1.0, x1 - x0)) + "\" height=\"" + std::to_string(bar_h) +
             "\" fill=\"" + region_color(iv.label.region) +
             "\" stroke=\"#666666\" stroke-width=\"0.5\">" + "<title>" +
             to_string(iv.label.region) + "</title></rect>\n";
      if (x1 - x0 > 48) {
        svg += "<text x=\"" + num(0.5 * (x0 + x1)) + "\" y=\"" +
               num(bar_y + bar_h / 2.0 + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#222222\" "
               "text-anchor=\"middle\">" +
               to_string(iv.label.region) + "</text>\n";
      }
    }
    for (const auto& c : traj.crossings) {
      double x = pad + plot_w * c.t / T;
      svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(bar_y - 4) + "\" x2=\"" +
             num(x) + "\" y2=\"" + num(bar_y + bar_h + 4) +
             "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    }
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace sympos
