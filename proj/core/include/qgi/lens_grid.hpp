#pragma once

#include <vector>

#include "qgi/vec2.hpp"

namespace qgi {

struct LensNode {
  Vec2 pos;
  double weight = 0.0;  ///< m^2
};

/// Exact area of the disk |rho| <= R intersected with [x0,x1] x [y0,y1].
double disk_rect_overlap(double R, double x0, double x1, double y0, double y1);

/// Square grid of `samples` cells across the lens diameter. Interior cells get
/// one midpoint node; cells cut by the rim are split into subdivision^2 parts,
/// each weighted by its exact covered area, so the weights sum to pi R^2.
std::vector<LensNode> lens_nodes(double R, int samples, int subdivision = 8);

}  // namespace qgi
