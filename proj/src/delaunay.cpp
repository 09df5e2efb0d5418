#include "heatshape/delaunay.hpp"

#include <algorithm>
#include <unordered_map>

#include "heatshape/errors.hpp"

namespace heatshape {

namespace {

using Real = long double;

Real orient(const Vec2 &a, const Vec2 &b, const Vec2 &c) {
  const Real abx = Real(b.x()) - a.x(), aby = Real(b.y()) - a.y();
  const Real acx = Real(c.x()) - a.x(), acy = Real(c.y()) - a.y();
  return abx * acy - aby * acx;
}

// Positive when p lies strictly inside the circumcircle of ccw (a, b, c).
Real incircle(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &p) {
  const Real adx = Real(a.x()) - p.x(), ady = Real(a.y()) - p.y();
  const Real bdx = Real(b.x()) - p.x(), bdy = Real(b.y()) - p.y();
  const Real cdx = Real(c.x()) - p.x(), cdy = Real(c.y()) - p.y();
  const Real alift = adx * adx + ady * ady;
  const Real blift = bdx * bdx + bdy * bdy;
  const Real clift = cdx * cdx + cdy * cdy;
  return adx * (bdy * clift - cdy * blift) - ady * (bdx * clift - cdx * blift) +
         alift * (bdx * cdy - bdy * cdx);
}

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb; // nb[i] is across the edge opposite v[i]; -1 = none
  bool alive = true;
};

class Triangulator {
public:
  explicit Triangulator(std::span<const Vec2> input)
      : n_(static_cast<int>(input.size())), pts_(input.begin(), input.end()) {
    Vec2 lo = pts_.front(), hi = pts_.front();
    for (const auto &p : pts_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const double d = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-3});
    const Vec2 mid = 0.5 * (lo + hi);
    pts_.emplace_back(mid.x() - 20 * d, mid.y() - 10 * d);
    pts_.emplace_back(mid.x() + 20 * d, mid.y() - 10 * d);
    pts_.emplace_back(mid.x(), mid.y() + 20 * d);
    tris_.push_back({{n_, n_ + 1, n_ + 2}, {-1, -1, -1}, true});
  }

  void run() {
    for (int i = 0; i < n_; ++i) insert(i);
  }

  std::vector<std::array<int, 3>> result() const {
    std::vector<std::array<int, 3>> out;
    for (const auto &t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= n_ || t.v[1] >= n_ || t.v[2] >= n_) continue;
      out.push_back(t.v);
    }
    return out;
  }

private:
  int locate(const Vec2 &p) const {
    int t = last_;
    const std::size_t cap = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < cap; ++step) {
      const Tri &tri = tris_[t];
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int i = static_cast<int>((k + step) % 3);
        const Vec2 &a = pts_[tri.v[(i + 1) % 3]];
        const Vec2 &b = pts_[tri.v[(i + 2) % 3]];
        if (orient(a, b, p) < 0 && tri.nb[i] >= 0) {
          t = tri.nb[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    // Walk failed to settle (degenerate cycle); fall back to a scan.
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      const Tri &tri = tris_[i];
      if (!tri.alive) continue;
      if (orient(pts_[tri.v[0]], pts_[tri.v[1]], p) >= 0 &&
          orient(pts_[tri.v[1]], pts_[tri.v[2]], p) >= 0 &&
          orient(pts_[tri.v[2]], pts_[tri.v[0]], p) >= 0) {
        return i;
      }
    }
    throw MeshError("delaunay: point location failed");
  }

  bool in_circle(int t, const Vec2 &p) const {
    const Tri &tri = tris_[t];
    return incircle(pts_[tri.v[0]], pts_[tri.v[1]], pts_[tri.v[2]], p) > 0;
  }

  void grow_cavity(int seed, const Vec2 &p) {
    cavity_.clear();
    ++stamp_id_;
    stamp_.resize(tris_.size(), 0);
    cavity_.push_back(seed);
    stamp_[seed] = stamp_id_;
    for (std::size_t head = 0; head < cavity_.size(); ++head) {
      const Tri &tri = tris_[cavity_[head]];
      for (int nb : tri.nb) {
        if (nb < 0 || stamp_[nb] == stamp_id_ || excluded_[nb] == exclusion_id_) continue;
        if (in_circle(nb, p)) {
          stamp_[nb] = stamp_id_;
          cavity_.push_back(nb);
        }
      }
    }
  }

  void insert(int pi) {
    const Vec2 &p = pts_[pi];
    const int seed = locate(p);
    for (int v : tris_[seed].v) {
      if (pts_[v] == p) throw MeshError("delaunay: duplicate input point");
    }

    excluded_.resize(tris_.size(), 0);
    ++exclusion_id_;
    for (;;) {
      grow_cavity(seed, p);
      // Every boundary edge of the cavity must see p strictly on its left;
      // drop offending triangles until the cavity is star-shaped.
      int offender = -1;
      for (int t : cavity_) {
        const Tri &tri = tris_[t];
        for (int i = 0; i < 3 && offender < 0; ++i) {
          const int nb = tri.nb[i];
          if (nb >= 0 && stamp_[nb] == stamp_id_) continue;
          const Vec2 &a = pts_[tri.v[(i + 1) % 3]];
          const Vec2 &b = pts_[tri.v[(i + 2) % 3]];
          if (!(orient(a, b, p) > 0)) offender = t;
        }
        if (offender >= 0) break;
      }
      if (offender < 0) break;
      if (offender == seed) throw MeshError("delaunay: degenerate insertion");
      excluded_[offender] = exclusion_id_;
    }

    std::unordered_map<int, int> starts, ends;
    std::vector<int> created;
    for (int t : cavity_) {
      const Tri tri = tris_[t];
      for (int i = 0; i < 3; ++i) {
        const int nb = tri.nb[i];
        if (nb >= 0 && stamp_[nb] == stamp_id_) continue;
        const int a = tri.v[(i + 1) % 3];
        const int b = tri.v[(i + 2) % 3];
        const int id = static_cast<int>(tris_.size());
        tris_.push_back({{a, b, pi}, {-1, -1, nb}, true});
        if (nb >= 0) {
          for (int &back : tris_[nb].nb) {
            if (back == t) back = id;
          }
        }
        starts[a] = id;
        ends[b] = id;
        created.push_back(id);
      }
    }
    for (int t : cavity_) tris_[t].alive = false;
    for (int id : created) {
      Tri &tri = tris_[id];
      tri.nb[0] = starts.at(tri.v[1]);
      tri.nb[1] = ends.at(tri.v[0]);
    }
    last_ = created.front();
  }

  int n_;
  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> cavity_;
  std::vector<int> stamp_;
  std::vector<int> excluded_;
  int stamp_id_ = 0;
  int exclusion_id_ = 0;
  int last_ = 0;
};

} // namespace

double orient2d(const Vec2 &a, const Vec2 &b, const Vec2 &c) {
  return static_cast<double>(orient(a, b, c));
}

std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Vec2> points) {
  if (points.size() < 3) throw MeshError("delaunay: need at least three points");
  Triangulator tr(points);
  tr.run();
  return tr.result();
}

} // namespace heatshape
