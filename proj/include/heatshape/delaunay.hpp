#pragma once

#include <array>
#include <span>
#include <vector>

#include "heatshape/geometry.hpp"

namespace heatshape {

/// Delaunay triangulation of a planar point set (incremental Bowyer-Watson
/// with a star-shaped cavity repair, extended-precision predicates).
/// Returns counter-clockwise vertex triples indexing `points`. Cocircular
/// ties are broken by insertion order, so the result is deterministic for a
/// given input ordering. Duplicate points are rejected with MeshError.
std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Vec2> points);

/// Twice the signed area of (a, b, c); positive for counter-clockwise order.
double orient2d(const Vec2 &a, const Vec2 &b, const Vec2 &c);

} // namespace heatshape
