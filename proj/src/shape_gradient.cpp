#include "heatshape/shape_gradient.hpp"

#include "heatshape/errors.hpp"

namespace heatshape {

InterfaceTraces extract_traces(const InterfaceMesh &mesh,
                               const std::vector<InterfaceQuadraturePoint> &quadrature,
                               const Trajectory &u, const Trajectory &g,
                               const TrackingTarget &target) {
  if (u.kind != TrajectoryKind::Forward || g.kind != TrajectoryKind::Adjoint) {
    throw ContractViolation("extract_traces needs a forward and an adjoint trajectory");
  }
  if (!(u.grid == g.grid) || u.mesh_fingerprint != g.mesh_fingerprint) {
    throw ContractViolation("extract_traces: trajectories do not share mesh and grid");
  }
  if (quadrature.size() != mesh.interface_edges.size()) {
    throw MeshError("interface quadrature does not match the interface segments");
  }
  const auto nq = static_cast<Eigen::Index>(quadrature.size());
  const int ns = u.grid.steps;
  const double dt = u.grid.dt();

  InterfaceTraces tr;
  tr.grid = u.grid;
  for (Eigen::MatrixXd *m : {&tr.u_S, &tr.u_O, &tr.g_S, &tr.g_O, &tr.du_S, &tr.du_O, &tr.dg_S,
                             &tr.dg_O, &tr.dtu_S, &tr.dtu_O, &tr.target_S}) {
    m->setZero(nq, ns + 1);
  }

  struct Side {
    std::array<int, 3> v;
    std::array<Vec2, 3> grad;
    std::array<double, 3> bary;
  };
  auto side = [&](int tri, Region region, const Vec2 &x) {
    const Triangle &t = mesh.triangles[static_cast<std::size_t>(tri)];
    if (t.region != region) throw MeshError("interface segment owned by a triangle of the wrong region");
    const Vec2 &a = mesh.vertices[t.v[0]];
    const Vec2 &b = mesh.vertices[t.v[1]];
    const Vec2 &c = mesh.vertices[t.v[2]];
    const P1Gradients pg = p1_gradients(a, b, c);
    Side s{t.v, pg.grad, {}};
    for (int i = 0; i < 3; ++i) s.bary[i] = 1.0 / 3.0 + pg.grad[i].dot(x - (a + b + c) / 3.0);
    for (double w : s.bary) {
      if (w < -1e-9) throw MeshError("interface quadrature point outside its owning triangle");
    }
    return s;
  };
  auto value = [](const Side &s, const Eigen::VectorXd &f) {
    return s.bary[0] * f[s.v[0]] + s.bary[1] * f[s.v[1]] + s.bary[2] * f[s.v[2]];
  };
  auto tangential = [](const Side &s, const Eigen::VectorXd &f, const Vec2 &tau) {
    const Vec2 grad = f[s.v[0]] * s.grad[0] + f[s.v[1]] * s.grad[1] + f[s.v[2]] * s.grad[2];
    return tau.dot(grad);
  };

  for (Eigen::Index q = 0; q < nq; ++q) {
    const auto &e = mesh.interface_edges[static_cast<std::size_t>(q)];
    const auto &qp = quadrature[static_cast<std::size_t>(q)];
    const Side S = side(e.s_triangle, Region::Matrix, qp.point);
    const Side O = side(e.o_triangle, Region::Inclusion, qp.point);
    for (int k = 0; k <= ns; ++k) {
      const Eigen::VectorXd &uk = u[k];
      const Eigen::VectorXd &gk = g[k];
      tr.u_S(q, k) = value(S, uk);
      tr.u_O(q, k) = value(O, uk);
      tr.g_S(q, k) = value(S, gk);
      tr.g_O(q, k) = value(O, gk);
      tr.du_S(q, k) = tangential(S, uk, qp.tangent);
      tr.du_O(q, k) = tangential(O, uk, qp.tangent);
      tr.dg_S(q, k) = tangential(S, gk, qp.tangent);
      tr.dg_O(q, k) = tangential(O, gk, qp.tangent);
    }
  }
  for (int k = 0; k <= ns; ++k) {
    const Eigen::VectorXd tk = target.at(k);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const auto &e = mesh.interface_edges[static_cast<std::size_t>(q)];
      const auto &qp = quadrature[static_cast<std::size_t>(q)];
      tr.target_S(q, k) = value(side(e.s_triangle, Region::Matrix, qp.point), tk);
    }
  }
  for (int k = 1; k <= ns; ++k) {
    tr.dtu_S.col(k) = (tr.u_S.col(k) - tr.u_S.col(k - 1)) / dt;
    tr.dtu_O.col(k) = (tr.u_O.col(k) - tr.u_O.col(k - 1)) / dt;
  }
  return tr;
}

Density ball_density(const InterfaceTraces &tr, const PhysicalParams &params,
                     const DiscGeometry &geom) {
  const double kappa = params.kappa;
  const double R = params.resistance;
  const double r = geom.radius;
  const double jump_coef = 2.0 * ((kappa - 1.0) / (kappa * R * R) + 1.0 / (r * R));
  const double dt = tr.grid.dt();
  const Eigen::Index nq = tr.points();

  Density d;
  for (auto &t : d.terms) t.setZero(nq);
  for (int k = 1; k <= tr.grid.steps; ++k) {
    for (Eigen::Index q = 0; q < nq; ++q) {
      const double e = tr.u_S(q, k) - tr.target_S(q, k);
      d.terms[0][q] += dt * (e * e);
      d.terms[1][q] += dt * (jump_coef * (tr.g_O(q, k) - tr.g_S(q, k)) * (tr.u_O(q, k) - tr.u_S(q, k)));
      d.terms[2][q] += dt * (2.0 * kappa * tr.dg_O(q, k) * tr.du_O(q, k));
      d.terms[3][q] += dt * (-2.0 * tr.dg_S(q, k) * tr.du_S(q, k));
      d.terms[4][q] += dt * (2.0 * tr.dtu_O(q, k) * tr.g_O(q, k));
      d.terms[5][q] += dt * (-2.0 * tr.dtu_S(q, k) * tr.g_S(q, k));
    }
  }
  d.G = d.terms[0];
  for (int i = 1; i < kDensityTerms; ++i) d.G += d.terms[static_cast<std::size_t>(i)];
  return d;
}

namespace {

Vec2 integrate_normal(const Eigen::VectorXd &G,
                      const std::vector<InterfaceQuadraturePoint> &quadrature) {
  Vec2 out = Vec2::Zero();
  for (std::size_t q = 0; q < quadrature.size(); ++q) {
    out += quadrature[q].weight * G[static_cast<Eigen::Index>(q)] * quadrature[q].normal;
  }
  return out;
}

} // namespace

ShapeGradient center_gradient(const Density &density,
                              const std::vector<InterfaceQuadraturePoint> &quadrature) {
  if (static_cast<std::size_t>(density.G.size()) != quadrature.size()) {
    throw ContractViolation("density and quadrature sizes differ");
  }
  ShapeGradient sg;
  sg.density = density;
  sg.quadrature = quadrature;
  sg.g_center = integrate_normal(density.G, quadrature);
  for (int i = 0; i < kDensityTerms; ++i) {
    sg.term_gradients[static_cast<std::size_t>(i)] =
        integrate_normal(density.terms[static_cast<std::size_t>(i)], quadrature);
  }
  return sg;
}

double translation_derivative(const Density &density,
                              const std::vector<InterfaceQuadraturePoint> &quadrature,
                              const Vec2 &f) {
  double out = 0.0;
  for (std::size_t q = 0; q < quadrature.size(); ++q) {
    out += quadrature[q].weight * f.dot(quadrature[q].normal) * density.G[static_cast<Eigen::Index>(q)];
  }
  return out;
}

} // namespace heatshape
