#include "heatshape/optimizer.hpp"

#include <cmath>
#include <sstream>

#include "heatshape/errors.hpp"

namespace heatshape {

void ProblemSetup::validate() const {
  physics.validate();
  grid.validate();
  if (std::abs(grid.horizon - physics.horizon) > 1e-14 * physics.horizon) {
    throw ContractViolation("time grid horizon differs from the physical horizon");
  }
  if (!(radius > 0.0)) throw ContractViolation("radius must be positive");
  if (functional.kind == TargetKind::Recorded && !functional.recorded) {
    throw ContractViolation("recorded functional without a trajectory");
  }
}

State::State(const ProblemSetup &setup, InterfaceMesh mesh)
    : mesh_(std::make_shared<const InterfaceMesh>(std::move(mesh))) {
  ops_ = std::make_shared<const SystemOperators>(assemble(*mesh_, setup.physics));
  solver_ = std::make_shared<const TransientSolver>(*ops_, setup.grid);
  target_ = std::make_shared<const TrackingTarget>(*mesh_, setup.functional, setup.grid,
                                                   setup.physics.boundary_temperature);
  u_ = solver_->forward(setup.physics.boundary_temperature);
  if (setup.forward_observer) setup.forward_observer(*mesh_, *ops_, u_);
  J_ = evaluate_J(u_, *target_, *ops_);
}

ShapeGradient State::gradient(const ProblemSetup &setup) const {
  Trajectory g;
  return gradient(setup, g);
}

ShapeGradient State::gradient(const ProblemSetup &setup, Trajectory &adjoint) const {
  adjoint = solver_->adjoint(u_, *target_);
  const auto quadrature = interface_quadrature(*mesh_);
  const InterfaceTraces traces = extract_traces(*mesh_, quadrature, u_, adjoint, *target_);
  const Density density = ball_density(traces, setup.physics, mesh_->geometry);
  return center_gradient(density, quadrature);
}

State evaluate_state(const ProblemSetup &setup, const Vec2 &center) {
  setup.validate();
  return State(setup, generate_mesh(setup.disc(center), setup.mesh, setup.domain));
}

FdResult fd_gradient_oracle(const ProblemSetup &setup, const Vec2 &center, double delta,
                            FdMode mode) {
  setup.validate();
  if (!(delta > 0.0)) throw ContractViolation("finite-difference step must be positive");
  validate_geometry(setup.disc(center), setup.domain.margin);
  const InterfaceMesh base = generate_mesh(setup.disc(center), setup.mesh, setup.domain);

  auto J_at = [&](const Vec2 &c) {
    validate_geometry(setup.disc(c), setup.domain.margin);
    if (mode == FdMode::Remesh) return evaluate_state(setup, c).J();
    return State(setup, transport_mesh(base, c)).J();
  };

  FdResult r;
  for (int i = 0; i < 2; ++i) {
    Vec2 e = Vec2::Zero();
    e[i] = delta;
    r.J_plus[static_cast<std::size_t>(i)] = J_at(center + e);
    r.J_minus[static_cast<std::size_t>(i)] = J_at(center - e);
    r.gradient[i] = (r.J_plus[static_cast<std::size_t>(i)] - r.J_minus[static_cast<std::size_t>(i)]) /
                    (2.0 * delta);
  }
  return r;
}

void OptimizerConfig::validate() const {
  if (!(alpha0 > 0.0)) throw ContractViolation("alpha0 must be positive");
  if (max_iters < 1) throw ContractViolation("max_iters must be at least 1");
  if (max_backtracks < 0) throw ContractViolation("max_backtracks must be nonnegative");
  if (!(tol_x >= 0.0) || !(tol_J >= 0.0) || !(tol_stationary >= 0.0)) throw ContractViolation("tolerances must be nonnegative");
}

const char *status_name(OptimizeStatus status) {
  switch (status) {
  case OptimizeStatus::Converged: return "converged";
  case OptimizeStatus::Stationary: return "stationary";
  case OptimizeStatus::Stalled: return "stalled";
  case OptimizeStatus::MaxIterations: return "max_iterations";
  }
  return "?";
}

Vec2 project_direction(const Vec2 &center, const Vec2 &direction, double radius, double margin) {
  const CenterBounds b = center_bounds(radius, margin);
  Vec2 d = direction;
  for (int i = 0; i < 2; ++i) {
    if ((center[i] <= b.lo && d[i] < 0.0) || (center[i] >= b.hi && d[i] > 0.0)) d[i] = 0.0;
  }
  return d;
}

OptimizeResult optimize(const ProblemSetup &setup, const Vec2 &initial_center,
                        const OptimizerConfig &config,
                        const std::function<void(const HistoryRow &)> &progress) {
  setup.validate();
  config.validate();
  // A disc touching the square is admissible as a start; it is moved onto
  // the box that leaves room for the meshing margin.
  validate_geometry(setup.disc(initial_center), 0.0);

  OptimizeResult result;
  auto record = [&](const HistoryRow &row) {
    result.history.push_back(row);
    if (progress) progress(row);
  };

  Vec2 c = project_center(initial_center, setup.radius, setup.domain.margin);
  if (c != initial_center) {
    std::ostringstream os;
    os << "initial center (" << initial_center.x() << ", " << initial_center.y()
       << ") projected to (" << c.x() << ", " << c.y() << ")";
    result.notes.push_back(os.str());
  }
  State state = evaluate_state(setup, c);
  Vec2 grad = state.gradient(setup).g_center;
  record({0, c, state.J(), grad, 0.0, 0});

  auto finish = [&](OptimizeStatus status, std::string reason) {
    result.status = status;
    result.reason = std::move(reason);
    result.final_geometry = setup.disc(c);
    return result;
  };

  for (int it = 1; it <= config.max_iters; ++it) {
    Vec2 d = project_direction(c, -grad, setup.radius, setup.domain.margin);
    const double dn = d.norm();
    if (!(dn > config.tol_stationary * grad.norm())) {
      return finish(OptimizeStatus::Stationary, "projected gradient negligible");
    }
    if (config.normalize) d /= dn;

    double alpha = config.alpha0;
    int backtracks = 0;
    for (;;) {
      const Vec2 trial = project_center(c + alpha * d, setup.radius, setup.domain.margin);
      State next = evaluate_state(setup, trial);
      if (next.J() < state.J()) {
        const double move = (trial - c).norm();
        const double decrease = state.J() - next.J();
        const double J_old = state.J();
        c = trial;
        state = std::move(next);
        grad = state.gradient(setup).g_center;
        record({it, c, state.J(), grad, move, backtracks});
        if (move < config.tol_x) return finish(OptimizeStatus::Converged, "center move below tol_x");
        if (decrease <= config.tol_J * J_old) {
          return finish(OptimizeStatus::Converged, "relative decrease of J below tol_J");
        }
        break;
      }
      if (backtracks == config.max_backtracks) {
        std::ostringstream os;
        os << "no decrease of J after " << backtracks << " backtracks (last step " << alpha << ")";
        return finish(OptimizeStatus::Stalled, os.str());
      }
      alpha *= 0.5;
      ++backtracks;
    }
  }
  return finish(OptimizeStatus::MaxIterations, "iteration limit reached");
}

} // namespace heatshape
