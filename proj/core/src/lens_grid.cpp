#include "qgi/lens_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qgi/error.hpp"

namespace qgi {

namespace {

// Area of the disk inside [0,x] x [0,y] for x, y >= 0.
double quadrant_area(double R, double x, double y) {
  x = std::min(x, R);
  y = std::min(y, R);
  if (x * x + y * y <= R * R) return x * y;
  // Integral of sqrt(R^2 - t^2) from 0 to X, given the chord half-height s at X.
  // atan2 keeps the angle well conditioned near the rim, where asin is not.
  const auto h = [R](double X, double s) { return 0.5 * (X * s + R * R * std::atan2(X, s)); };
  const double sx = std::sqrt((R - x) * (R + x));
  const double xc = std::sqrt((R - y) * (R + y));
  if (x <= xc) return x * y;
  return y * xc + h(x, sx) - h(xc, y);
}

double signed_area(double R, double x, double y) {
  const double s = (x < 0.0 ? -1.0 : 1.0) * (y < 0.0 ? -1.0 : 1.0);
  return s * quadrant_area(R, std::fabs(x), std::fabs(y));
}

}  // namespace

double disk_rect_overlap(double R, double x0, double x1, double y0, double y1) {
  const double a = signed_area(R, x1, y1) - signed_area(R, x0, y1) - signed_area(R, x1, y0) +
                   signed_area(R, x0, y0);
  return std::max(a, 0.0);
}

std::vector<LensNode> lens_nodes(double R, int samples, int subdivision) {
  if (!(R > 0.0)) throw DomainError("lens radius must be positive");
  if (samples < 2 || subdivision < 1) throw DomainError("lens grid needs >= 2 samples");
  const double h = 2.0 * R / samples;
  const double r2 = R * R;
  std::vector<LensNode> nodes;
  nodes.reserve(static_cast<std::size_t>(samples) * samples);
  for (int iy = 0; iy < samples; ++iy) {
    const double y0 = -R + iy * h;
    const double y1 = y0 + h;
    for (int ix = 0; ix < samples; ++ix) {
      const double x0 = -R + ix * h;
      const double x1 = x0 + h;
      const double far_x = std::max(std::fabs(x0), std::fabs(x1));
      const double far_y = std::max(std::fabs(y0), std::fabs(y1));
      if (far_x * far_x + far_y * far_y <= r2) {
        nodes.push_back({{x0 + 0.5 * h, y0 + 0.5 * h}, h * h});
        continue;
      }
      if (disk_rect_overlap(R, x0, x1, y0, y1) <= 64.0 * std::numeric_limits<double>::epsilon() * r2) continue;
      const double hs = h / subdivision;
      // Sub-cells wholly outside the rim can pick up rounding-level area.
      const double min_w = 64.0 * std::numeric_limits<double>::epsilon() * r2;
      for (int sy = 0; sy < subdivision; ++sy) {
        for (int sx = 0; sx < subdivision; ++sx) {
          const double a0 = x0 + sx * hs;
          const double b0 = y0 + sy * hs;
          const double w = disk_rect_overlap(R, a0, a0 + hs, b0, b0 + hs);
          if (w > min_w) nodes.push_back({{a0 + 0.5 * hs, b0 + 0.5 * hs}, w});
        }
      }
    }
  }
  return nodes;
}

}  // namespace qgi
