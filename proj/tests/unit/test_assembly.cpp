#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <doctest.h>

#include "heatshape/assembly.hpp"
#include "heatshape/errors.hpp"

using namespace heatshape;

namespace {

bool exactly_symmetric(const SparseMatrix &A) {
  const SparseMatrix At = A.transpose();
  const SparseMatrix D = A - At;
  for (int k = 0; k < D.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(D, k); it; ++it) {
      if (it.value() != 0.0) return false;
    }
  }
  return true;
}

const InterfaceMesh &mesh() {
  static const InterfaceMesh m = generate_mesh({{0.43, 0.58}, 0.2}, {0.02, 64});
  return m;
}

} // namespace

TEST_CASE("assembled operators are exactly symmetric") {
  const SystemOperators ops = assemble(mesh(), {});
  CHECK(exactly_symmetric(ops.M));
  CHECK(exactly_symmetric(ops.K));
  CHECK(exactly_symmetric(ops.B));
  CHECK(exactly_symmetric(ops.M_matrix));
}

TEST_CASE("mass integrates constants to the region areas") {
  const SystemOperators ops = assemble(mesh(), {});
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(ops.size());
  CHECK(one.dot(ops.M * one) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(one.dot(ops.M_matrix * one) ==
        doctest::Approx(mesh().region_area(Region::Matrix)).epsilon(1e-12));
}

TEST_CASE("constants lie in the kernels of K and B") {
  const SystemOperators ops = assemble(mesh(), {});
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(ops.size(), 3.7);
  CHECK((ops.K * c).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((ops.B * c).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("constant interface jump has energy perimeter / R") {
  for (double R : {1e-2, 0.3}) {
    PhysicalParams p;
    p.resistance = R;
    const SystemOperators ops = assemble(mesh(), p);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(ops.size());
    for (std::size_t i = 0; i < mesh().num_vertices(); ++i) {
      if (mesh().vertex_region[i] == Region::Inclusion) z[static_cast<Eigen::Index>(i)] = 1.0;
    }
    const double expected = 2.0 * 64 * 0.2 * std::sin(std::numbers::pi / 64) / R;
    CHECK(std::abs(z.dot(ops.B * z) - expected) <= 1e-12 * expected);
  }
}

TEST_CASE("stiffness is kappa-weighted on the inclusion") {
  PhysicalParams p;
  p.kappa = 7.0;
  const SystemOperators ops = assemble(mesh(), p);
  // u = x: energy = area(S) + kappa * area(O)
  Eigen::VectorXd u(ops.size());
  for (Eigen::Index i = 0; i < ops.size(); ++i) u[i] = mesh().vertices[static_cast<std::size_t>(i)].x();
  const double expected =
      mesh().region_area(Region::Matrix) + 7.0 * mesh().region_area(Region::Inclusion);
  CHECK(u.dot(ops.K * u) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("K + B is positive semidefinite and definite after elimination") {
  const InterfaceMesh small = generate_mesh({{0.5, 0.5}, 0.2}, {0.05, 16}, {0.05});
  const SystemOperators ops = assemble(small, {});
  const Eigen::MatrixXd A = Eigen::MatrixXd(ops.K + ops.B);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
  CHECK_NOTHROW(ConstrainedSystem(ops.K + ops.B, ops.dirichlet_nodes));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd v(ops.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = n01(rng);
    CHECK(v.dot((ops.K + ops.B) * v) >= 0.0);
  }
}

TEST_CASE("Dirichlet elimination imposes the value exactly") {
  const SystemOperators ops = assemble(mesh(), {});
  const ConstrainedSystem sys = apply_dirichlet(ops, 0.01);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u01;
  Eigen::VectorXd rhs(ops.size());
  for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs[i] = u01(rng);
  const Eigen::VectorXd x = sys.solve(rhs, 500.0);
  REQUIRE_FALSE(ops.dirichlet_nodes.empty());
  for (int d : ops.dirichlet_nodes) CHECK(x[d] == 500.0);

  const SparseMatrix A = ops.M + 0.01 * (ops.K + ops.B);
  const Eigen::VectorXd res = A * x - rhs;
  std::vector<bool> constrained(static_cast<std::size_t>(ops.size()), false);
  for (int d : ops.dirichlet_nodes) constrained[static_cast<std::size_t>(d)] = true;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < res.size(); ++i) {
    if (!constrained[static_cast<std::size_t>(i)]) worst = std::max(worst, std::abs(res[i]));
  }
  CHECK(worst <= 1e-9);

  const Eigen::VectorXd zero = sys.solve(Eigen::VectorXd::Zero(ops.size()), 0.0);
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("heated nodes are exactly the vertices on y = 0") {
  const SystemOperators ops = assemble(mesh(), {});
  for (int d : ops.dirichlet_nodes) CHECK(mesh().vertices[static_cast<std::size_t>(d)].y() == 0.0);
  CHECK(ops.dirichlet_nodes.size() == 51);
}

TEST_CASE("constant-jump energy converges to the circle perimeter") {
  const double exact = 2 * std::numbers::pi * 0.2 / 1e-2;
  double prev = 1e300;
  for (int n : {32, 64, 128}) {
    const InterfaceMesh m = generate_mesh({{0.5, 0.5}, 0.2}, {0.02, n});
    const SystemOperators ops = assemble(m, {});
    Eigen::VectorXd z = Eigen::VectorXd::Zero(ops.size());
    for (std::size_t i = 0; i < m.num_vertices(); ++i) {
      if (m.vertex_region[i] == Region::Inclusion) z[static_cast<Eigen::Index>(i)] = 1.0;
    }
    const double err = std::abs(z.dot(ops.B * z) - exact);
    CHECK(err < 0.3 * prev);
    prev = err;
  }
}

TEST_CASE("physical parameters are validated") {
  PhysicalParams p;
  p.kappa = 1.0;
  CHECK_THROWS_AS(p.validate(), ContractViolation);
  p = {};
  p.resistance = 0.0;
  CHECK_THROWS_AS(p.validate(), ContractViolation);
  p = {};
  p.horizon = -1.0;
  CHECK_THROWS_AS(p.validate(), ContractViolation);
}
