#include "heatshape/assembly.hpp"

#include <sstream>

#include "heatshape/delaunay.hpp"
#include "heatshape/errors.hpp"

namespace heatshape {

void PhysicalParams::validate() const {
  if (!(kappa > 1.0)) throw ContractViolation("kappa must be greater than 1");
  if (!(resistance > 0.0)) throw ContractViolation("interfacial resistance must be positive");
  if (!(horizon > 0.0)) throw ContractViolation("time horizon must be positive");
}

P1Gradients p1_gradients(const Vec2 &a, const Vec2 &b, const Vec2 &c) {
  const double twice_area = orient2d(a, b, c);
  // grad phi_i = perp(opposite edge) / (2 area), perp(x, y) = (-y, x)
  auto g = [twice_area](const Vec2 &from, const Vec2 &to) {
    const Vec2 e = to - from;
    return Vec2(-e.y() / twice_area, e.x() / twice_area);
  };
  return {{g(b, c), g(c, a), g(a, b)}, 0.5 * twice_area};
}

SystemOperators assemble(const InterfaceMesh &mesh, const PhysicalParams &params) {
  params.validate();
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  std::vector<Eigen::Triplet<double>> mass, stiff, jump, mass_matrix;
  mass.reserve(9 * mesh.triangles.size());
  stiff.reserve(9 * mesh.triangles.size());

  for (const auto &t : mesh.triangles) {
    const P1Gradients pg =
        p1_gradients(mesh.vertices[t.v[0]], mesh.vertices[t.v[1]], mesh.vertices[t.v[2]]);
    const double weight = t.region == Region::Inclusion ? params.kappa : 1.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double m = pg.area / 12.0 * (i == j ? 2.0 : 1.0);
        const double k = weight * pg.area * pg.grad[i].dot(pg.grad[j]);
        mass.emplace_back(t.v[i], t.v[j], m);
        stiff.emplace_back(t.v[i], t.v[j], k);
        if (t.region == Region::Matrix) mass_matrix.emplace_back(t.v[i], t.v[j], m);
      }
    }
  }

  // Exact edge mass [l/3 l/6; l/6 l/3] applied to the jump [v] = v_O - v_S.
  const double inv_r = 1.0 / params.resistance;
  for (const auto &e : mesh.interface_edges) {
    const int s[2] = {e.s_a, e.s_b};
    const int o[2] = {e.o_a, e.o_b};
    for (int p = 0; p < 2; ++p) {
      for (int q = 0; q < 2; ++q) {
        const double w = inv_r * e.length * (p == q ? 1.0 / 3.0 : 1.0 / 6.0);
        jump.emplace_back(o[p], o[q], w);
        jump.emplace_back(s[p], s[q], w);
        jump.emplace_back(o[p], s[q], -w);
        jump.emplace_back(s[p], o[q], -w);
      }
    }
  }

  SystemOperators ops;
  ops.M.resize(n, n);
  ops.K.resize(n, n);
  ops.B.resize(n, n);
  ops.M_matrix.resize(n, n);
  ops.M.setFromTriplets(mass.begin(), mass.end());
  ops.K.setFromTriplets(stiff.begin(), stiff.end());
  ops.B.setFromTriplets(jump.begin(), jump.end());
  ops.M_matrix.setFromTriplets(mass_matrix.begin(), mass_matrix.end());
  ops.dirichlet_nodes = mesh.heated_vertices();
  ops.mesh_fingerprint = mesh.fingerprint();
  return ops;
}

ConstrainedSystem::ConstrainedSystem(const SparseMatrix &A, const std::vector<int> &constrained)
    : constrained_(constrained), free_of_(A.rows(), 0) {
  for (int c : constrained_) free_of_[c] = -1;
  for (int i = 0; i < static_cast<int>(free_of_.size()); ++i) {
    if (free_of_[i] < 0) continue;
    free_of_[i] = static_cast<int>(free_.size());
    free_.push_back(i);
  }
  const auto nf = static_cast<Eigen::Index>(free_.size());
  std::vector<Eigen::Triplet<double>> ff;
  lift_ = Eigen::VectorXd::Zero(nf);
  for (int col = 0; col < A.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(A, col); it; ++it) {
      const int fr = free_of_[it.row()];
      const int fc = free_of_[it.col()];
      if (fr < 0) continue;
      if (fc >= 0) {
        ff.emplace_back(fr, fc, it.value());
      } else {
        lift_[fr] += it.value();
      }
    }
  }
  SparseMatrix Aff(nf, nf);
  Aff.setFromTriplets(ff.begin(), ff.end());
  llt_.compute(Aff);
  if (llt_.info() != Eigen::Success) {
    throw SolverError("sparse Cholesky failed: constrained operator not positive definite");
  }
}

Eigen::VectorXd ConstrainedSystem::solve(const Eigen::VectorXd &rhs, double value) const {
  Eigen::VectorXd rf(static_cast<Eigen::Index>(free_.size()));
  for (std::size_t i = 0; i < free_.size(); ++i) rf[i] = rhs[free_[i]];
  if (value != 0.0) rf -= value * lift_;
  const Eigen::VectorXd xf = llt_.solve(rf);
  if (llt_.info() != Eigen::Success) throw SolverError("sparse Cholesky solve failed");
  Eigen::VectorXd x(static_cast<Eigen::Index>(free_of_.size()));
  for (int c : constrained_) x[c] = value;
  for (std::size_t i = 0; i < free_.size(); ++i) x[free_[i]] = xf[i];
  return x;
}

ConstrainedSystem apply_dirichlet(const SystemOperators &ops, double dt) {
  const SparseMatrix A = ops.M + dt * (ops.K + ops.B);
  return ConstrainedSystem(A, ops.dirichlet_nodes);
}

} // namespace heatshape
