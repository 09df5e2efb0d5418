#include <cmath>

#include <doctest.h>

#include "heatshape/errors.hpp"
#include "heatshape/optimizer.hpp"

using namespace heatshape;

TEST_CASE("direction projection at active bounds") {
  // box is [0.22, 0.78]^2 for r = 0.2, margin 0.02
  CHECK(project_direction({0.5, 0.22}, {0.3, -1.0}, 0.2, 0.02) == Vec2(0.3, 0.0));
  CHECK(project_direction({0.5, 0.22}, {0.3, 1.0}, 0.2, 0.02) == Vec2(0.3, 1.0));
  CHECK(project_direction({0.78, 0.78}, {1.0, 1.0}, 0.2, 0.02) == Vec2(0.0, 0.0));
  CHECK(project_direction({0.5, 0.5}, {-1.0, 2.0}, 0.2, 0.02) == Vec2(-1.0, 2.0));
}

TEST_CASE("finite differences of a zero problem vanish") {
  ProblemSetup s;
  s.physics.boundary_temperature = 0.0;
  const FdResult fd = fd_gradient_oracle(s, {0.45, 0.5});
  CHECK(fd.gradient.norm() == 0.0);
}

TEST_CASE("finite differences respect mirror symmetry") {
  ProblemSetup s;
  for (FdMode mode : {FdMode::Transport, FdMode::Remesh}) {
    const FdResult fd = fd_gradient_oracle(s, {0.5, 0.45}, 1e-3, mode);
    CHECK(std::abs(fd.gradient.x()) <= 1e-2 * std::abs(fd.gradient.y()));
  }
}

TEST_CASE("finite differences reject infeasible perturbations") {
  ProblemSetup s;
  CHECK_THROWS_AS(fd_gradient_oracle(s, {0.5, 0.2205}, 1e-3), GeometryError);
}

TEST_CASE("independent meshes of one center agree on J to within tol_J") {
  ProblemSetup s;
  for (const Vec2 &c : {Vec2(0.5, 0.5), Vec2(0.5, 0.3), Vec2(0.37, 0.61)}) {
    const double J0 = evaluate_state(s, c).J();
    const InterfaceMesh other = transport_mesh(generate_mesh(s.disc(c + Vec2(0.011, -0.005)), s.mesh), c);
    const double J1 = State(s, other).J();
    CHECK(std::abs(J1 - J0) < 1e-4 * J0);
  }
}

TEST_CASE("optimizer history is feasible and monotone") {
  ProblemSetup s;
  s.mesh = {0.04, 32};
  s.domain.margin = 0.04;
  s.grid = {20, 0.5};
  OptimizerConfig cfg;
  cfg.max_iters = 6;
  const OptimizeResult r = optimize(s, {0.3, 0.6}, cfg);
  REQUIRE(r.history.size() >= 2);
  CHECK(r.history.front().iter == 0);
  const CenterBounds b = center_bounds(0.2, 0.04);
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    const auto &h = r.history[i];
    CHECK(h.center.x() >= b.lo);
    CHECK(h.center.x() <= b.hi);
    CHECK(h.center.y() >= b.lo);
    CHECK(h.center.y() <= b.hi);
    if (i > 0) {
      CHECK(h.J < r.history[i - 1].J);
      CHECK(h.step <= cfg.alpha0 * (1 + 1e-12));
      CHECK(h.backtracks <= cfg.max_backtracks);
    }
  }
  CHECK(r.final_geometry.center == r.history.back().center);
}

TEST_CASE("optimizer projects a boundary-touching start and rejects an outside one") {
  ProblemSetup s;
  s.mesh = {0.04, 32};
  s.domain.margin = 0.04;
  s.grid = {10, 0.5};
  OptimizerConfig cfg;
  cfg.max_iters = 1;
  const OptimizeResult r = optimize(s, {0.5, 0.2}, cfg);
  CHECK(r.history.front().center.x() == 0.5);
  CHECK(r.history.front().center.y() == doctest::Approx(0.24).epsilon(1e-15));
  CHECK(r.notes.size() == 1);
  CHECK_THROWS_AS(optimize(s, {0.5, 0.1}, cfg), GeometryError);
}

TEST_CASE("a zero gradient stops immediately as stationary") {
  ProblemSetup s;
  s.physics.boundary_temperature = 0.0;
  s.mesh = {0.04, 32};
  s.domain.margin = 0.04;
  s.grid = {10, 0.5};
  const OptimizeResult r = optimize(s, {0.4, 0.5}, {});
  CHECK(r.status == OptimizeStatus::Stationary);
  CHECK(r.history.size() == 1);
}

TEST_CASE("optimizer and setup validation") {
  OptimizerConfig cfg;
  cfg.alpha0 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  cfg = {};
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  ProblemSetup s;
  s.grid = {50, 1.0};
  CHECK_THROWS_AS(s.validate(), ContractViolation);
}

TEST_CASE("mirrored starts give mirrored histories") {
  ProblemSetup s;
  s.mesh = {0.04, 32};
  s.domain.margin = 0.04;
  s.grid = {20, 0.5};
  OptimizerConfig cfg;
  cfg.max_iters = 5;
  const OptimizeResult l = optimize(s, {0.3, 0.65}, cfg);
  const OptimizeResult r = optimize(s, {0.7, 0.65}, cfg);
  REQUIRE(l.history.size() == r.history.size());
  for (std::size_t i = 0; i < l.history.size(); ++i) {
    CHECK(std::abs(l.history[i].center.x() + r.history[i].center.x() - 1.0) <= 2e-2);
    CHECK(std::abs(l.history[i].center.y() - r.history[i].center.y()) <= 2e-2);
  }
}
