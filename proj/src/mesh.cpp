#include "heatshape/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

#include "heatshape/delaunay.hpp"
#include "heatshape/errors.hpp"

namespace heatshape {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAxisTol = 1e-12;

int round_even(double v, int min_value) {
  const int n = 2 * static_cast<int>(std::lround(v / 2.0));
  return std::max(n, min_value);
}

using EdgeKey = std::pair<int, int>;
EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

// n (even) nodes on the circle of radius rho, node j at angle
// -pi/2 + 2 pi j / n. The right half is computed, the left half is its
// reflection about the vertical line through the center, so both halves
// are exact mirror images when cx = 1/2.
std::vector<Vec2> ring_nodes(const Vec2 &c, double rho, int n) {
  std::vector<Vec2> out(n);
  const int half = n / 2;
  for (int j = 1; j < half; ++j) {
    const double th = -kPi / 2 + 2 * kPi * j / n;
    out[j] = Vec2(c.x() + rho * std::cos(th), c.y() + rho * std::sin(th));
  }
  out[0] = Vec2(c.x(), c.y() - rho);
  out[half] = Vec2(c.x(), c.y() + rho);
  for (int j = half + 1; j < n; ++j) {
    const Vec2 &m = out[n - j];
    out[j] = Vec2(2 * c.x() - m.x(), m.y());
  }
  return out;
}

bool on_square_boundary(const Vec2 &p) {
  return p.x() == 0.0 || p.x() == 1.0 || p.y() == 0.0 || p.y() == 1.0;
}

// Hexagonal lattice of the unit square including its boundary. Even rows
// hold i/nx, odd rows are offset by half a cell; in odd rows the two points
// closest to x = 0, 1/2, 1 are replaced by a single point on that line so
// that the boundary and the symmetry axis are resolved by lattice columns.
std::vector<Vec2> lattice_points(double h) {
  const int nx = round_even(1.0 / h, 4);
  const int ny = round_even(1.0 / (h * std::sqrt(3.0) / 2.0), 4);
  std::vector<Vec2> pts;
  for (int j = 0; j <= ny; ++j) {
    const double y = static_cast<double>(j) / ny;
    if (j % 2 == 0) {
      for (int i = 0; i <= nx; ++i) pts.emplace_back(static_cast<double>(i) / nx, y);
    } else {
      pts.emplace_back(0.0, y);
      for (int i = 1; i <= nx - 2; ++i) {
        if (i == nx / 2) pts.emplace_back(0.5, y);
        if (i == nx / 2 - 1 || i == nx / 2) continue;
        pts.emplace_back(static_cast<double>(2 * i + 1) / (2 * nx), y);
      }
      pts.emplace_back(1.0, y);
    }
  }
  return pts;
}

struct Part {
  std::vector<Vec2> pts;
  std::vector<std::array<int, 3>> tris;
  std::vector<int> circle; // index of circle vertex k within pts
};

void orient_ccw(const std::vector<Vec2> &pts, std::array<int, 3> &t) {
  if (orient2d(pts[t[0]], pts[t[1]], pts[t[2]]) < 0) std::swap(t[1], t[2]);
}

Part triangulate_matrix(const DiscGeometry &geom, const std::vector<Vec2> &circle, double h) {
  const int n = static_cast<int>(circle.size());
  const double r = geom.radius;
  const double a = kPi / n;
  // Keeping lattice points outside this band makes every polygon side a
  // Gabriel edge, so the Delaunay triangulation recovers the interface.
  const double band = std::max(0.5 * h, 1.1 * r * (std::cos(a) + std::sin(a) - 1.0));

  Part part;
  for (const Vec2 &p : lattice_points(h)) {
    if (on_square_boundary(p) || (p - geom.center).norm() >= r + band) part.pts.push_back(p);
  }
  for (int k = 0; k < n; ++k) {
    part.circle.push_back(static_cast<int>(part.pts.size()));
    part.pts.push_back(circle[k]);
  }
  // Helper vertex at the center resolves the cocircular polygon vertices;
  // every triangle using it lies inside the polygon and is discarded.
  const int helper = static_cast<int>(part.pts.size());
  part.pts.push_back(geom.center);

  const double apothem = r * std::cos(a);
  for (const auto &t : delaunay_triangulate(part.pts)) {
    if (t[0] == helper || t[1] == helper || t[2] == helper) continue;
    const Vec2 centroid = (part.pts[t[0]] + part.pts[t[1]] + part.pts[t[2]]) / 3.0;
    if ((centroid - geom.center).norm() < apothem) continue;
    part.tris.push_back(t);
  }
  part.pts.pop_back();

  std::map<EdgeKey, int> uses;
  for (const auto &t : part.tris) {
    for (int i = 0; i < 3; ++i) ++uses[edge_key(t[i], t[(i + 1) % 3])];
  }
  for (int k = 0; k < n; ++k) {
    const auto it = uses.find(edge_key(part.circle[k], part.circle[(k + 1) % n]));
    if (it == uses.end() || it->second != 1) {
      std::ostringstream os;
      os << "interface segment " << k << " not recovered by the matrix triangulation"
         << " (increase N_Gamma or the margin)";
      throw MeshError(os.str());
    }
  }
  return part;
}

// Replaces the right half of a matrix triangulation of a disc centered on
// x = 1/2 by the reflection of its left half.
void symmetrize_matrix(Part &part, const std::vector<Vec2> &circle) {
  enum Side { Left, Axis, Right };
  const int np = static_cast<int>(part.pts.size());
  std::vector<Side> side(np);
  for (int i = 0; i < np; ++i) {
    const double x = part.pts[i].x();
    side[i] = std::abs(x - 0.5) <= kAxisTol ? Axis : (x < 0.5 ? Left : Right);
  }
  std::vector<int> remap(np, -1);
  std::vector<Vec2> pts;
  for (int i = 0; i < np; ++i) {
    if (side[i] == Right) continue;
    remap[i] = static_cast<int>(pts.size());
    pts.push_back(side[i] == Axis ? Vec2(0.5, part.pts[i].y()) : part.pts[i]);
  }
  const int kept = static_cast<int>(pts.size());
  std::vector<int> mirror(kept);
  for (int i = 0; i < kept; ++i) {
    if (pts[i].x() == 0.5) {
      mirror[i] = i;
    } else {
      mirror[i] = static_cast<int>(pts.size());
      pts.emplace_back(1.0 - pts[i].x(), pts[i].y());
    }
  }

  std::vector<std::array<int, 3>> tris;
  for (const auto &t : part.tris) {
    bool has_left = false, has_right = false;
    for (int v : t) {
      has_left |= side[v] == Left;
      has_right |= side[v] == Right;
    }
    if (has_left && has_right) throw MeshError("symmetric meshing: triangle straddles the axis");
    if (!has_left) continue;
    const std::array<int, 3> l{remap[t[0]], remap[t[1]], remap[t[2]]};
    tris.push_back(l);
    tris.push_back({mirror[l[0]], mirror[l[2]], mirror[l[1]]});
  }

  const int n = static_cast<int>(circle.size());
  std::vector<int> circ(n);
  for (int k = 0; k < n; ++k) {
    const int old = part.circle[k];
    if (side[old] != Right) {
      circ[k] = remap[old];
    } else {
      circ[k] = mirror[remap[part.circle[(n - k) % n]]];
    }
    if (pts[circ[k]] != circle[k]) throw MeshError("symmetric meshing: circle vertex mismatch");
  }
  part.pts = std::move(pts);
  part.tris = std::move(tris);
  part.circle = std::move(circ);
}

// Structured ring layout of the disc: rings of even vertex counts, the
// right half stitched ring-to-ring and reflected onto the left half.
Part triangulate_inclusion(const DiscGeometry &geom, const std::vector<Vec2> &circle, double h) {
  const int n = static_cast<int>(circle.size());
  const int rings = std::max(2, static_cast<int>(std::lround(geom.radius / h)));

  Part part;
  std::vector<std::vector<int>> ring(rings + 1);
  for (int k = 0; k < n; ++k) {
    part.circle.push_back(k);
    part.pts.push_back(circle[k]);
  }
  ring[rings] = part.circle;
  int prev_count = n;
  for (int k = rings - 1; k >= 1; --k) {
    const int count =
        std::clamp(round_even(static_cast<double>(n) * k / rings, 6), 6, prev_count);
    prev_count = count;
    const auto nodes = ring_nodes(geom.center, geom.radius * k / rings, count);
    for (const auto &p : nodes) {
      ring[k].push_back(static_cast<int>(part.pts.size()));
      part.pts.push_back(p);
    }
  }
  const int center = static_cast<int>(part.pts.size());
  part.pts.push_back(geom.center);

  // Reflection partner of every vertex (ring position j <-> count - j).
  std::vector<int> mirror(part.pts.size());
  mirror[center] = center;
  for (int k = 1; k <= rings; ++k) {
    const int count = static_cast<int>(ring[k].size());
    for (int j = 0; j < count; ++j) mirror[ring[k][j]] = ring[k][(count - j) % count];
  }

  std::vector<std::array<int, 3>> right;
  {
    const auto &r1 = ring[1];
    const int half = static_cast<int>(r1.size()) / 2;
    for (int j = 0; j < half; ++j) right.push_back({center, r1[j], r1[j + 1]});
  }
  for (int k = 1; k < rings; ++k) {
    const auto &in = ring[k];
    const auto &out = ring[k + 1];
    const int a = static_cast<int>(in.size()) / 2;
    const int b = static_cast<int>(out.size()) / 2;
    int i = 0, o = 0;
    while (i < a || o < b) {
      const bool advance_outer = (i == a) || (o < b && (o + 1) * a <= (i + 1) * b);
      if (advance_outer) {
        right.push_back({in[i], out[o], out[o + 1]});
        ++o;
      } else {
        right.push_back({in[i], out[o], in[i + 1]});
        ++i;
      }
    }
  }
  for (auto t : right) {
    orient_ccw(part.pts, t);
    part.tris.push_back(t);
    part.tris.push_back({mirror[t[0]], mirror[t[2]], mirror[t[1]]});
  }
  return part;
}

InterfaceMesh generate_direct(const DiscGeometry &geom, const MeshParams &params) {
  const int n = params.interface_segments;
  const auto circle = ring_nodes(geom.center, geom.radius, n);

  Part matrix = triangulate_matrix(geom, circle, params.h);
  if (geom.center.x() == 0.5) symmetrize_matrix(matrix, circle);
  Part inclusion = triangulate_inclusion(geom, circle, params.h);

  std::vector<Vec2> vertices = matrix.pts;
  std::vector<Region> regions(vertices.size(), Region::Matrix);
  std::vector<Triangle> triangles;
  for (const auto &t : matrix.tris) triangles.push_back({t, Region::Matrix});
  const int offset = static_cast<int>(vertices.size());
  for (const auto &p : inclusion.pts) {
    vertices.push_back(p);
    regions.push_back(Region::Inclusion);
  }
  for (const auto &t : inclusion.tris) {
    triangles.push_back({{t[0] + offset, t[1] + offset, t[2] + offset}, Region::Inclusion});
  }
  std::vector<int> inclusion_circle;
  for (int k : inclusion.circle) inclusion_circle.push_back(k + offset);

  return finalize_mesh(geom, params, std::move(vertices), std::move(regions),
                       std::move(triangles), std::move(matrix.circle),
                       std::move(inclusion_circle));
}

} // namespace

std::vector<int> InterfaceMesh::heated_vertices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertex_region[i] == Region::Matrix && vertices[i].y() == 0.0) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

double InterfaceMesh::region_area(Region r) const {
  double area = 0.0;
  for (const auto &t : triangles) {
    if (t.region != r) continue;
    area += 0.5 * orient2d(vertices[t.v[0]], vertices[t.v[1]], vertices[t.v[2]]);
  }
  return area;
}

double InterfaceMesh::interface_perimeter() const {
  double p = 0.0;
  for (const auto &e : interface_edges) p += e.length;
  return p;
}

std::uint64_t InterfaceMesh::fingerprint() const {
  std::uint64_t hash = 1469598103934665603ull;
  auto mix = [&hash](const void *data, std::size_t bytes) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      hash ^= p[i];
      hash *= 1099511628211ull;
    }
  };
  for (const auto &v : vertices) {
    const double xy[2] = {v.x(), v.y()};
    mix(xy, sizeof xy);
  }
  for (const auto &t : triangles) {
    mix(t.v.data(), sizeof(int) * 3);
    const auto region = static_cast<std::uint8_t>(t.region);
    mix(&region, 1);
  }
  return hash;
}

InterfaceMesh finalize_mesh(const DiscGeometry &geom, const MeshParams &params,
                            std::vector<Vec2> vertices, std::vector<Region> vertex_region,
                            std::vector<Triangle> triangles, std::vector<int> matrix_circle,
                            std::vector<int> inclusion_circle) {
  InterfaceMesh mesh;
  mesh.geometry = geom;
  mesh.params = params;
  mesh.vertices = std::move(vertices);
  mesh.vertex_region = std::move(vertex_region);
  mesh.triangles = std::move(triangles);
  mesh.matrix_circle = std::move(matrix_circle);
  mesh.inclusion_circle = std::move(inclusion_circle);

  const int n = static_cast<int>(mesh.matrix_circle.size());
  if (n < 3 || static_cast<int>(mesh.inclusion_circle.size()) != n) {
    throw MeshError("finalize_mesh: inconsistent circle vertex lists");
  }

  std::map<EdgeKey, int> matrix_owner, inclusion_owner;
  std::map<EdgeKey, int> matrix_uses;
  for (int ti = 0; ti < static_cast<int>(mesh.triangles.size()); ++ti) {
    const auto &t = mesh.triangles[ti];
    for (int i = 0; i < 3; ++i) {
      const EdgeKey key = edge_key(t.v[i], t.v[(i + 1) % 3]);
      if (t.region == Region::Matrix) {
        matrix_owner[key] = ti;
        ++matrix_uses[key];
      } else {
        inclusion_owner[key] = ti;
      }
    }
  }

  std::map<EdgeKey, bool> is_chord;
  for (int k = 0; k < n; ++k) {
    InterfaceEdge e{};
    e.s_a = mesh.matrix_circle[k];
    e.s_b = mesh.matrix_circle[(k + 1) % n];
    e.o_a = mesh.inclusion_circle[k];
    e.o_b = mesh.inclusion_circle[(k + 1) % n];
    const Vec2 &pa = mesh.vertices[e.s_a];
    const Vec2 &pb = mesh.vertices[e.s_b];
    e.length = (pb - pa).norm();
    e.midpoint = 0.5 * (pa + pb);
    e.arc_param = geom.radius * 2.0 * kPi * (k + 0.5) / n;
    const auto s_it = matrix_owner.find(edge_key(e.s_a, e.s_b));
    const auto o_it = inclusion_owner.find(edge_key(e.o_a, e.o_b));
    if (s_it == matrix_owner.end() || o_it == inclusion_owner.end()) {
      std::ostringstream os;
      os << "interface segment " << k << " has no owning triangle on both sides";
      throw MeshError(os.str());
    }
    e.s_triangle = s_it->second;
    e.o_triangle = o_it->second;
    is_chord[edge_key(e.s_a, e.s_b)] = true;
    mesh.interface_edges.push_back(e);
  }

  for (const auto &[key, count] : matrix_uses) {
    if (count != 1 || is_chord.count(key)) continue;
    const Vec2 &a = mesh.vertices[key.first];
    const Vec2 &b = mesh.vertices[key.second];
    const BoundaryPart part = (a.y() == 0.0 && b.y() == 0.0) ? BoundaryPart::Heated
                                                               : BoundaryPart::Insulated;
    mesh.boundary_edges.push_back({key.first, key.second, part});
  }
  return mesh;
}

InterfaceMesh generate_mesh(const DiscGeometry &geom, const MeshParams &params,
                            const DomainSpec &domain) {
  const double h = params.h;
  const int n = params.interface_segments;
  if (n < 16 || n % 2 != 0) {
    throw MeshError("interface segment count must be even and at least 16");
  }
  if (!(h > 0.0) || h > geom.radius / 2.0 * (1.0 + 1e-12)) {
    throw MeshError("mesh size h must satisfy 0 < h <= radius / 2");
  }
  if (domain.margin < h * (1.0 - 1e-9)) {
    throw MeshError("margin must be at least the mesh size h");
  }
  if (!(geom.radius > 0.0) || !is_interior(geom, domain.margin)) {
    std::ostringstream os;
    os << "disc not interior: center (" << geom.center.x() << ", " << geom.center.y()
       << "), radius " << geom.radius << ", margin " << domain.margin;
    throw GeometryError(os.str());
  }

  InterfaceMesh mesh;
  if (std::abs(geom.center.x() - 0.5) <= kAxisTol) {
    DiscGeometry snapped = geom;
    snapped.center.x() = 0.5;
    mesh = generate_direct(snapped, params);
  } else if (geom.center.x() > 0.5) {
    DiscGeometry reflected = geom;
    reflected.center.x() = 1.0 - geom.center.x();
    mesh = mirror_mesh(generate_direct(reflected, params));
    mesh.geometry = geom;
  } else {
    mesh = generate_direct(geom, params);
  }
  check_mesh(mesh);
  return mesh;
}

InterfaceMesh mirror_mesh(const InterfaceMesh &mesh) {
  std::vector<Vec2> vertices;
  vertices.reserve(mesh.vertices.size());
  for (const auto &v : mesh.vertices) vertices.emplace_back(1.0 - v.x(), v.y());
  std::vector<Triangle> triangles = mesh.triangles;
  for (auto &t : triangles) std::swap(t.v[1], t.v[2]);
  const int n = static_cast<int>(mesh.matrix_circle.size());
  std::vector<int> mc(n), ic(n);
  for (int k = 0; k < n; ++k) {
    mc[k] = mesh.matrix_circle[(n - k) % n];
    ic[k] = mesh.inclusion_circle[(n - k) % n];
  }
  DiscGeometry geom = mesh.geometry;
  geom.center.x() = 1.0 - geom.center.x();
  return finalize_mesh(geom, mesh.params, std::move(vertices), mesh.vertex_region,
                       std::move(triangles), std::move(mc), std::move(ic));
}

InterfaceMesh transport_mesh(const InterfaceMesh &mesh, const Vec2 &new_center) {
  const DiscGeometry &g = mesh.geometry;
  const Vec2 shift = new_center - g.center;
  const double r = g.radius;
  const double wall = std::min({g.center.x() - r, 1.0 - g.center.x() - r, g.center.y() - r,
                                1.0 - g.center.y() - r});
  if (!(shift.norm() < 0.5 * wall)) {
    throw MeshError("transport_mesh: displacement too large for the available clearance");
  }
  std::vector<char> on_circle(mesh.vertices.size(), 0);
  for (int v : mesh.matrix_circle) on_circle[v] = 1;

  std::vector<Vec2> vertices = mesh.vertices;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (mesh.vertex_region[i] == Region::Inclusion || on_circle[i]) {
      vertices[i] += shift;
      continue;
    }
    const double s = std::clamp(((vertices[i] - g.center).norm() - r) / wall, 0.0, 1.0);
    const double weight = 1.0 - s * s * (3.0 - 2.0 * s);
    vertices[i] += weight * shift;
  }
  DiscGeometry moved = g;
  moved.center = new_center;
  InterfaceMesh out = finalize_mesh(moved, mesh.params, std::move(vertices), mesh.vertex_region,
                                    mesh.triangles, mesh.matrix_circle, mesh.inclusion_circle);
  check_mesh(out);
  return out;
}

void check_mesh(const InterfaceMesh &mesh) {
  auto fail = [](const std::string &what) { throw MeshError("mesh check: " + what); };
  const std::size_t nv = mesh.vertices.size();
  if (mesh.vertex_region.size() != nv) fail("vertex_region size mismatch");
  const double h = mesh.params.h;
  const double r = mesh.geometry.radius;

  for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
    const auto &t = mesh.triangles[ti];
    for (int v : t.v) {
      if (v < 0 || static_cast<std::size_t>(v) >= nv) fail("triangle index out of range");
      if (mesh.vertex_region[v] != t.region) fail("triangle uses a vertex of the other region");
    }
    const double area =
        0.5 * orient2d(mesh.vertices[t.v[0]], mesh.vertices[t.v[1]], mesh.vertices[t.v[2]]);
    if (!(area >= 1e-3 * h * h)) {
      std::ostringstream os;
      os << "triangle " << ti << " has area " << area << " below 1e-3 h^2";
      fail(os.str());
    }
  }
  const int n = static_cast<int>(mesh.matrix_circle.size());
  for (int k = 0; k < n; ++k) {
    const Vec2 &s = mesh.vertices[mesh.matrix_circle[k]];
    const Vec2 &o = mesh.vertices[mesh.inclusion_circle[k]];
    if (std::memcmp(s.data(), o.data(), sizeof(double) * 2) != 0) {
      fail("interface duplicate coordinates differ");
    }
    if (std::abs((s - mesh.geometry.center).norm() - r) > 1e-12) {
      fail("interface vertex off the circle");
    }
  }
  const double total = mesh.region_area(Region::Matrix) + mesh.region_area(Region::Inclusion);
  if (std::abs(total - 1.0) > 1e-10) fail("triangles do not tile the unit square");
  const double polygon = 0.5 * n * r * r * std::sin(2.0 * kPi / n);
  if (std::abs(mesh.region_area(Region::Inclusion) - polygon) > 1e-10) {
    fail("inclusion triangles do not tile the interface polygon");
  }
  for (const auto &e : mesh.boundary_edges) {
    const Vec2 &a = mesh.vertices[e.a];
    const Vec2 &b = mesh.vertices[e.b];
    if (!on_square_boundary(a) || !on_square_boundary(b)) fail("boundary edge off the square");
    if (e.part == BoundaryPart::Heated && (a.y() != 0.0 || b.y() != 0.0)) {
      fail("heated edge off y = 0");
    }
  }
}

std::vector<InterfaceQuadraturePoint> interface_quadrature(const InterfaceMesh &mesh) {
  std::vector<InterfaceQuadraturePoint> out;
  out.reserve(mesh.interface_edges.size());
  const DiscGeometry &g = mesh.geometry;
  for (const auto &e : mesh.interface_edges) {
    InterfaceQuadraturePoint q;
    q.point = e.midpoint;
    const Vec2 d = e.midpoint - g.center;
    q.on_circle = g.center + g.radius * d / d.norm();
    const InterfaceFrame f = interface_frame(g, q.on_circle);
    q.tangent = f.tangent;
    q.normal = f.normal;
    q.weight = e.length;
    q.arc_param = e.arc_param;
    out.push_back(q);
  }
  return out;
}


PointLocator::PointLocator(const InterfaceMesh &mesh)
    : mesh_(&mesh),
      cells_(std::max(1, static_cast<int>(std::ceil(1.0 / (2.0 * mesh.params.h))))),
      buckets_(static_cast<std::size_t>(cells_) * cells_) {
  auto cell = [this](double v) {
    return std::clamp(static_cast<int>(std::floor(v * cells_)), 0, cells_ - 1);
  };
  for (int ti = 0; ti < static_cast<int>(mesh.triangles.size()); ++ti) {
    const auto &t = mesh.triangles[ti];
    Vec2 lo = mesh.vertices[t.v[0]], hi = lo;
    for (int v : t.v) {
      lo = lo.cwiseMin(mesh.vertices[v]);
      hi = hi.cwiseMax(mesh.vertices[v]);
    }
    for (int j = cell(lo.y()); j <= cell(hi.y()); ++j) {
      for (int i = cell(lo.x()); i <= cell(hi.x()); ++i) {
        buckets_[static_cast<std::size_t>(j) * cells_ + i].push_back(ti);
      }
    }
  }
}

PointLocator::Hit PointLocator::locate(const Vec2 &p, Region preferred) const {
  const int i = std::clamp(static_cast<int>(std::floor(p.x() * cells_)), 0, cells_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor(p.y() * cells_)), 0, cells_ - 1);
  const auto &bucket = buckets_[static_cast<std::size_t>(j) * cells_ + i];
  constexpr double tol = 1e-10;
  Hit fallback;
  for (int ti : bucket) {
    const auto &t = mesh_->triangles[ti];
    const Vec2 &a = mesh_->vertices[t.v[0]];
    const Vec2 &b = mesh_->vertices[t.v[1]];
    const Vec2 &c = mesh_->vertices[t.v[2]];
    const double area = orient2d(a, b, c);
    const double wb = orient2d(a, p, c) / area;
    const double wc = orient2d(a, b, p) / area;
    const double wa = 1.0 - wb - wc;
    if (wa < -tol || wb < -tol || wc < -tol) continue;
    Hit hit{ti, {wa, wb, wc}};
    if (t.region == preferred) return hit;
    if (fallback.triangle < 0) fallback = hit;
  }
  return fallback;
}

} // namespace heatshape
