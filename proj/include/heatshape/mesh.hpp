#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "heatshape/geometry.hpp"

namespace heatshape {

/// Material region of a triangle or vertex: matrix S or inclusion O.
enum class Region : std::uint8_t { Matrix = 0, Inclusion = 1 };

struct MeshParams {
  double h = 0.02;           ///< target edge length
  int interface_segments = 64; ///< N_Gamma, segments of the inscribed polygon
};

struct Triangle {
  std::array<int, 3> v;
  Region region;
};

/// One segment of the inscribed interface polygon. The matrix-side and
/// inclusion-side endpoints are distinct vertices with bitwise equal
/// coordinates, so discrete fields can jump across the interface.
struct InterfaceEdge {
  int s_a, s_b;            ///< matrix-side endpoints (counter-clockwise order)
  int o_a, o_b;            ///< inclusion-side duplicates of s_a, s_b
  double length;
  Vec2 midpoint;           ///< chord midpoint
  double arc_param;        ///< arc length from the bottom point, counter-clockwise
  int s_triangle;          ///< matrix triangle owning the edge
  int o_triangle;          ///< inclusion triangle owning the edge
};

struct BoundaryEdge {
  int a, b;
  BoundaryPart part;
};

/// Fitted triangulation of the unit square with the disc as a separate
/// region. Matrix vertices come first, then inclusion vertices.
struct InterfaceMesh {
  DiscGeometry geometry;
  MeshParams params;
  std::vector<Vec2> vertices;
  std::vector<Region> vertex_region;
  std::vector<Triangle> triangles;
  std::vector<InterfaceEdge> interface_edges;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<int> matrix_circle;    ///< matrix-side circle vertex k
  std::vector<int> inclusion_circle; ///< inclusion-side circle vertex k

  std::size_t num_vertices() const { return vertices.size(); }
  double h() const { return params.h; }
  /// Vertices lying on the heated side y = 0.
  std::vector<int> heated_vertices() const;
  double region_area(Region r) const;
  double interface_perimeter() const;
  /// Stable 64-bit fingerprint of coordinates and connectivity.
  std::uint64_t fingerprint() const;
};

/// Builds the fitted mesh: a structured ring layout inside the disc and a
/// Delaunay triangulation of a hexagonal lattice outside, both conforming
/// to the same regular N_Gamma-gon inscribed in the circle (vertex k at
/// angle -pi/2 + 2 pi k / N_Gamma).
///
/// Deterministic. Mirror-equivariant about x = 1/2: the mesh of a disc
/// centered at (1 - cx, cy) is the reflection of the mesh at (cx, cy); for
/// cx = 1/2 the mesh itself is reflection symmetric.
///
/// Throws GeometryError for an infeasible disc, MeshError for unusable
/// parameters (N_Gamma < 16 or odd, h > r/2, margin < h) or a failed
/// interface recovery.
InterfaceMesh generate_mesh(const DiscGeometry &geom, const MeshParams &params,
                            const DomainSpec &domain = {});

/// Moves the inclusion rigidly to `new_center`, dragging matrix vertices
/// with a smooth cutoff that vanishes before the square boundary. The
/// result has the same connectivity as `mesh` and is itself a valid fitted
/// mesh of the translated disc. Throws MeshError if an element inverts.
InterfaceMesh transport_mesh(const InterfaceMesh &mesh, const Vec2 &new_center);

/// Reflection x -> 1 - x of a mesh (orientation and circle numbering fixed
/// up accordingly).
InterfaceMesh mirror_mesh(const InterfaceMesh &mesh);

/// Checks every structural invariant; throws MeshError with a description
/// of the first violation.
void check_mesh(const InterfaceMesh &mesh);

struct InterfaceQuadraturePoint {
  Vec2 point;     ///< chord midpoint (lies on the discrete interface)
  Vec2 on_circle; ///< midpoint projected radially to the true circle
  double weight;  ///< chord length
  Vec2 tangent;
  Vec2 normal;
  double arc_param;
};

/// Midpoint rule on each interface segment, frames evaluated on the circle.
std::vector<InterfaceQuadraturePoint> interface_quadrature(const InterfaceMesh &mesh);

/// Bucket-grid point location over the triangles of a mesh.
class PointLocator {
public:
  explicit PointLocator(const InterfaceMesh &mesh);

  struct Hit {
    int triangle = -1;
    std::array<double, 3> bary{}; ///< barycentric weights of the triangle's vertices
  };

  /// Finds a triangle containing `p` (closed, tolerance 1e-10 on the
  /// barycentric weights), trying triangles of `preferred` first. Returns a
  /// Hit with triangle = -1 when no triangle contains the point.
  Hit locate(const Vec2 &p, Region preferred) const;

private:
  const InterfaceMesh *mesh_;
  int cells_;
  std::vector<std::vector<int>> buckets_;
};

/// Assembles an InterfaceMesh from raw parts, recomputing interface and
/// boundary edge records. Used by the generator, the transport and the
/// target-file reader.
InterfaceMesh finalize_mesh(const DiscGeometry &geom, const MeshParams &params,
                            std::vector<Vec2> vertices, std::vector<Region> vertex_region,
                            std::vector<Triangle> triangles, std::vector<int> matrix_circle,
                            std::vector<int> inclusion_circle);

} // namespace heatshape
