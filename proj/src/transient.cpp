#include "heatshape/transient.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "heatshape/errors.hpp"

namespace heatshape {

void TimeGrid::validate() const {
  if (steps < 1) throw ContractViolation("time grid needs at least one step");
  if (!(horizon > 0.0)) throw ContractViolation("time horizon must be positive");
}

FunctionalSpec FunctionalSpec::recorded_from(std::shared_ptr<const RecordedTarget> target) {
  if (!target) throw ContractViolation("recorded target is null");
  if (target->trajectory.kind != TrajectoryKind::Forward) {
    throw ContractViolation("recorded target must be a forward trajectory");
  }
  return {TargetKind::Recorded, std::move(target)};
}

const char *target_kind_name(TargetKind kind) {
  switch (kind) {
  case TargetKind::Constant: return "constant";
  case TargetKind::Recorded: return "recorded";
  case TargetKind::Zero: return "zero";
  }
  return "?";
}

TrackingTarget::TrackingTarget(const InterfaceMesh &mesh, const FunctionalSpec &spec,
                               const TimeGrid &grid, double boundary_temperature)
    : kind_(spec.kind), size_(static_cast<Eigen::Index>(mesh.num_vertices())) {
  if (kind_ == TargetKind::Constant) value_ = boundary_temperature;
  if (kind_ != TargetKind::Recorded) return;

  if (!spec.recorded) throw ContractViolation("recorded functional without a trajectory");
  const RecordedTarget &rec = *spec.recorded;
  if (!(rec.trajectory.grid == grid)) {
    throw ContractViolation("recorded target uses a different time grid");
  }
  const int nsteps = grid.steps;
  fields_.assign(static_cast<std::size_t>(nsteps + 1), Eigen::VectorXd::Zero(size_));

  const PointLocator locator(rec.mesh);
  for (Eigen::Index i = 0; i < size_; ++i) {
    if (mesh.vertex_region[static_cast<std::size_t>(i)] != Region::Matrix) continue;
    const Vec2 &p = mesh.vertices[static_cast<std::size_t>(i)];
    const auto hit = locator.locate(p, Region::Matrix);
    if (hit.triangle < 0) {
      std::ostringstream os;
      os << "recorded target: node " << i << " at (" << p.x() << ", " << p.y()
         << ") not found in the reference mesh";
      throw MeshError(os.str());
    }
    const auto &tv = rec.mesh.triangles[static_cast<std::size_t>(hit.triangle)].v;
    for (int k = 0; k <= nsteps; ++k) {
      const Eigen::VectorXd &src = rec.trajectory[k];
      fields_[static_cast<std::size_t>(k)][i] =
          hit.bary[0] * src[tv[0]] + hit.bary[1] * src[tv[1]] + hit.bary[2] * src[tv[2]];
    }
  }
}

Eigen::VectorXd TrackingTarget::at(int k) const {
  if (kind_ == TargetKind::Recorded) return fields_[static_cast<std::size_t>(k)];
  return Eigen::VectorXd::Constant(size_, value_);
}

TransientSolver::TransientSolver(const SystemOperators &ops, const TimeGrid &grid)
    : ops_(&ops), grid_((grid.validate(), grid)), system_(apply_dirichlet(ops, grid.dt())) {}

namespace {

void check_finite(const Eigen::VectorXd &v, const char *what, int k) {
  if (v.allFinite()) return;
  std::ostringstream os;
  os << what << " solve produced non-finite values at step " << k;
  throw SolverError(os.str());
}

} // namespace

Trajectory TransientSolver::forward(double boundary_temperature) const {
  Trajectory u;
  u.kind = TrajectoryKind::Forward;
  u.grid = grid_;
  u.mesh_fingerprint = ops_->mesh_fingerprint;
  u.fields.reserve(static_cast<std::size_t>(grid_.steps + 1));
  u.fields.push_back(Eigen::VectorXd::Zero(ops_->size()));
  for (int k = 0; k < grid_.steps; ++k) {
    const Eigen::VectorXd rhs = ops_->M * u.fields.back();
    u.fields.push_back(system_.solve(rhs, boundary_temperature));
    check_finite(u.fields.back(), "forward", k + 1);
  }
  return u;
}

Trajectory TransientSolver::adjoint(const Trajectory &u, const TrackingTarget &target) const {
  if (u.kind != TrajectoryKind::Forward) throw ContractViolation("adjoint needs a forward trajectory");
  if (!(u.grid == grid_)) throw ContractViolation("adjoint: time grid mismatch");
  if (u.mesh_fingerprint != ops_->mesh_fingerprint) {
    throw ContractViolation("adjoint: trajectory belongs to a different mesh");
  }
  const int n = grid_.steps;
  const double dt = grid_.dt();
  Trajectory g;
  g.kind = TrajectoryKind::Adjoint;
  g.grid = grid_;
  g.mesh_fingerprint = ops_->mesh_fingerprint;
  g.fields.assign(static_cast<std::size_t>(n + 1), Eigen::VectorXd::Zero(ops_->size()));
  for (int k = n - 1; k >= 0; --k) {
    const Eigen::VectorXd rhs =
        ops_->M * g[k + 1] + dt * (ops_->M_matrix * (u[k] - target.at(k)));
    g.fields[static_cast<std::size_t>(k)] = system_.solve(rhs, 0.0);
    check_finite(g[k], "adjoint", k);
  }
  return g;
}

Trajectory solve_forward(const SystemOperators &ops, const TimeGrid &grid,
                         const PhysicalParams &params) {
  return TransientSolver(ops, grid).forward(params.boundary_temperature);
}

Trajectory solve_adjoint(const SystemOperators &ops, const TimeGrid &grid,
                         const TrackingTarget &target, const Trajectory &u) {
  return TransientSolver(ops, grid).adjoint(u, target);
}

double evaluate_J(const Trajectory &u, const TrackingTarget &target, const SystemOperators &ops) {
  if (u.kind != TrajectoryKind::Forward) throw ContractViolation("J needs a forward trajectory");
  const double dt = u.grid.dt();
  double J = 0.0;
  for (int k = 1; k <= u.grid.steps; ++k) {
    const Eigen::VectorXd e = u[k] - target.at(k);
    J += dt * e.dot(ops.M_matrix * e);
  }
  return J;
}

std::vector<double> energy_history(const Trajectory &u, const SparseMatrix &M, double shift) {
  std::vector<double> out;
  out.reserve(u.fields.size());
  for (const auto &f : u.fields) {
    const Eigen::VectorXd v = f.array() - shift;
    out.push_back(std::sqrt(std::max(0.0, v.dot(M * v))));
  }
  return out;
}

} // namespace heatshape
