#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwareach/geometry.hpp"

namespace pwareach {

/// Renders 2-D polyhedra as filled polygons (vertices traced by
/// angle-ordered facet intersections). Fill colors come from a fixed-seed
/// generator, so identical inputs yield identical documents. Throws for
/// non-2-D input.
std::string render_svg(const std::vector<Polyhedron>& polys, const Vec& lo,
                       const Vec& hi, std::uint64_t color_seed = 7);

}  // namespace pwareach
