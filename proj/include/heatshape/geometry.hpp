#pragma once

#include <Eigen/Core>

namespace heatshape {

using Vec2 = Eigen::Vector2d;

/// Boundary parts of the unit square. `Heated` is the bottom side y = 0
/// carrying the imposed temperature; `Insulated` is the rest of the boundary.
enum class BoundaryPart { Heated, Insulated };

/// The design variable: a disc of fixed radius inside (0,1)^2.
struct DiscGeometry {
  Vec2 center{0.5, 0.5};
  double radius = 0.2;
};

/// Fixed domain description. The only tunable is the clearance kept between
/// the disc and the square boundary.
struct DomainSpec {
  double margin = 0.02;
};

/// Tangent/normal pair on the circle. The normal points from the matrix
/// into the disc, i.e. it is the outward normal of the matrix region.
struct InterfaceFrame {
  Vec2 tangent;
  Vec2 normal;
};

/// Which part of the square boundary a boundary point belongs to.
BoundaryPart classify_boundary_point(const Vec2 &x);

/// True when the closed disc B(center, radius + margin) lies in the closed
/// unit square (boundary contact tolerated to 1e-12).
bool is_interior(const DiscGeometry &geom, double margin);

/// Throws GeometryError("disc not interior ...") unless radius > 0 and the
/// disc with margin is interior.
void validate_geometry(const DiscGeometry &geom, double margin);

/// Analytic frame at a point of the circle:
///   tangent = ((x2-c2), -(x1-c1)) / r,  normal = -(x - c) / r.
/// Throws ContractViolation if | |x-c| - r | > 1e-9.
InterfaceFrame interface_frame(const DiscGeometry &geom, const Vec2 &x);

/// Componentwise clamp of `center` onto the admissible box
/// [r + margin, 1 - r - margin]^2. Throws GeometryError when the box is empty
/// (r + margin >= 0.5).
Vec2 project_center(const Vec2 &center, double radius, double margin);

/// The admissible box bounds [lo, hi] for each center coordinate.
struct CenterBounds {
  double lo;
  double hi;
};
CenterBounds center_bounds(double radius, double margin);

} // namespace heatshape
