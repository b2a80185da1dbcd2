#include "pwareach/svg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace pwareach {

namespace {

struct Pt {
  double x, y;
};

// Vertices of a bounded essential 2-D polytope: sort facets by normal
// angle; adjacent facets (cyclically) intersect in consecutive vertices.
std::vector<Pt> trace_polygon(const Polyhedron& poly, const Tolerances& tol) {
  std::vector<int> order;
  for (int i = 0; i < poly.size(); ++i)
    if (!poly.constraint(i).degenerate(tol.norm)) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ha = poly.constraint(a).normal;
    const auto& hb = poly.constraint(b).normal;
    return std::atan2(ha(1), ha(0)) < std::atan2(hb(1), hb(0));
  });
  std::vector<Pt> pts;
  const int m = static_cast<int>(order.size());
  if (m < 3) return pts;
  for (int k = 0; k < m; ++k) {
    const auto& h1 = poly.constraint(order[static_cast<size_t>(k)]);
    const auto& h2 = poly.constraint(order[static_cast<size_t>((k + 1) % m)]);
    const double det = h1.normal(0) * h2.normal(1) - h1.normal(1) * h2.normal(0);
    if (std::abs(det) < 1e-12) return {};
    const double x = (h1.offset * h2.normal(1) - h2.offset * h1.normal(1)) / det;
    const double y = (h1.normal(0) * h2.offset - h2.normal(0) * h1.offset) / det;
    Vec v(2);
    v << x, y;
    if (!poly.contains(v, 1e-6)) return {};
    pts.push_back({x, y});
  }
  return pts;
}

std::string color_hex(std::mt19937_64& rng) {
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  // Random hue, moderate saturation/lightness.
  const double h = unit() * 360.0;
  const double s = 0.45 + 0.35 * unit();
  const double l = 0.55 + 0.2 * unit();
  const double c = (1.0 - std::abs(2.0 * l - 1.0)) * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  const double m = l - c / 2.0;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround((r + m) * 255.0)),
                static_cast<int>(std::lround((g + m) * 255.0)),
                static_cast<int>(std::lround((b + m) * 255.0)));
  return buf;
}

}  // namespace

std::string render_svg(const std::vector<Polyhedron>& polys, const Vec& lo,
                       const Vec& hi, std::uint64_t color_seed) {
  if (lo.size() != 2 || hi.size() != 2)
    throw InvalidInputError("render_svg: 2-D sets only");
  for (const auto& p : polys)
    if (p.dim() != 2) throw InvalidInputError("render_svg: 2-D sets only");

  const double W = 720.0, H = 720.0, pad = 40.0;
  const double sx = (W - 2 * pad) / (hi(0) - lo(0));
  const double sy = (H - 2 * pad) / (hi(1) - lo(1));
  auto px = [&](double x) { return pad + (x - lo(0)) * sx; };
  auto py = [&](double y) { return H - pad - (y - lo(1)) * sy; };

  std::mt19937_64 rng(color_seed);
  Tolerances tol;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad
      << "\" height=\"" << H - 2 * pad
      << "\" fill=\"white\" stroke=\"#222\" stroke-width=\"1\"/>\n";

  for (const auto& poly : polys) {
    const std::string fill = color_hex(rng);
    Polyhedron clean = essential_hrep(remove_duplicates(poly, tol), tol);
    const std::vector<Pt> pts = trace_polygon(clean, tol);
    if (pts.size() >= 3) {
      out << "<polygon points=\"";
      for (const auto& p : pts) out << px(p.x) << "," << py(p.y) << " ";
      out << "\" fill=\"" << fill << "\" stroke=\"#333\" stroke-width=\"0.6\"/>\n";
    } else {
      // Too small or thin to trace; mark its feasible point instead.
      const ChebyshevResult ch = chebyshev_center(clean, tol);
      if (ch.feasible)
        out << "<circle cx=\"" << px(ch.center(0)) << "\" cy=\"" << py(ch.center(1))
            << "\" r=\"1.6\" fill=\"" << fill << "\"/>\n";
    }
  }

  // Axes, when the origin lines fall inside the view.
  if (lo(0) < 0.0 && hi(0) > 0.0)
    out << "<line x1=\"" << px(0.0) << "\" y1=\"" << pad << "\" x2=\"" << px(0.0)
        << "\" y2=\"" << H - pad
        << "\" stroke=\"#555\" stroke-width=\"0.8\" stroke-dasharray=\"4 3\"/>\n";
  if (lo(1) < 0.0 && hi(1) > 0.0)
    out << "<line x1=\"" << pad << "\" y1=\"" << py(0.0) << "\" x2=\"" << W - pad
        << "\" y2=\"" << py(0.0)
        << "\" stroke=\"#555\" stroke-width=\"0.8\" stroke-dasharray=\"4 3\"/>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace pwareach
