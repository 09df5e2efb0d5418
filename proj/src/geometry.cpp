#include "heatshape/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "heatshape/errors.hpp"

namespace heatshape {

namespace {
constexpr double kFeasibilityTol = 1e-12;
constexpr double kOnCircleTol = 1e-9;
} // namespace

BoundaryPart classify_boundary_point(const Vec2 &x) {
  return x.y() == 0.0 ? BoundaryPart::Heated : BoundaryPart::Insulated;
}

bool is_interior(const DiscGeometry &geom, double margin) {
  const double reach = geom.radius + margin;
  for (int i = 0; i < 2; ++i) {
    if (geom.center[i] - reach < -kFeasibilityTol ||
        geom.center[i] + reach > 1.0 + kFeasibilityTol) {
      return false;
    }
  }
  return true;
}

void validate_geometry(const DiscGeometry &geom, double margin) {
  if (!(geom.radius > 0.0)) {
    throw GeometryError("disc radius must be positive");
  }
  if (!(margin >= 0.0)) {
    throw GeometryError("margin must be nonnegative");
  }
  if (!is_interior(geom, margin)) {
    std::ostringstream os;
    os << "disc not interior: center (" << geom.center.x() << ", "
       << geom.center.y() << "), radius " << geom.radius << ", margin "
       << margin;
    throw GeometryError(os.str());
  }
}

InterfaceFrame interface_frame(const DiscGeometry &geom, const Vec2 &x) {
  const Vec2 d = x - geom.center;
  const double dist = d.norm();
  if (std::abs(dist - geom.radius) > kOnCircleTol) {
    std::ostringstream os;
    os << "interface_frame: point (" << x.x() << ", " << x.y()
       << ") is not on the circle (distance " << dist << ", radius "
       << geom.radius << ")";
    throw ContractViolation(os.str());
  }
  const double r = geom.radius;
  return {Vec2(d.y() / r, -d.x() / r), Vec2(-d.x() / r, -d.y() / r)};
}

CenterBounds center_bounds(double radius, double margin) {
  const double reach = radius + margin;
  if (!(reach < 0.5)) {
    std::ostringstream os;
    os << "infeasible geometry: radius + margin = " << reach
       << " leaves no admissible center";
    throw GeometryError(os.str());
  }
  return {reach, 1.0 - reach};
}

Vec2 project_center(const Vec2 &center, double radius, double margin) {
  const CenterBounds b = center_bounds(radius, margin);
  return {std::clamp(center.x(), b.lo, b.hi), std::clamp(center.y(), b.lo, b.hi)};
}

} // namespace heatshape
