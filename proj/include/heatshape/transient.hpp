#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "heatshape/assembly.hpp"
#include "heatshape/mesh.hpp"

namespace heatshape {

/// Uniform grid t_k = k dt, k = 0..steps, dt = horizon / steps.
struct TimeGrid {
  int steps = 50;
  double horizon = 0.5;

  double dt() const { return horizon / steps; }
  double time(int k) const { return k * dt(); }
  /// Throws ContractViolation unless steps >= 1 and horizon > 0.
  void validate() const;
  bool operator==(const TimeGrid &) const = default;
};

enum class TrajectoryKind { Forward, Adjoint };

/// Nodal fields at every time level k = 0..steps.
struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::Forward;
  TimeGrid grid;
  std::uint64_t mesh_fingerprint = 0;
  std::vector<Eigen::VectorXd> fields;

  const Eigen::VectorXd &operator[](int k) const { return fields[static_cast<std::size_t>(k)]; }
};

/// A forward trajectory together with the mesh it lives on.
struct RecordedTarget {
  InterfaceMesh mesh;
  Trajectory trajectory;
};

enum class TargetKind { Constant, Recorded, Zero };

/// Which temperature the tracking functional compares u_S against:
/// the heated-side value U_M, a recorded trajectory u_D, or zero.
struct FunctionalSpec {
  TargetKind kind = TargetKind::Constant;
  std::shared_ptr<const RecordedTarget> recorded;

  static FunctionalSpec constant() { return {TargetKind::Constant, nullptr}; }
  static FunctionalSpec zero() { return {TargetKind::Zero, nullptr}; }
  static FunctionalSpec recorded_from(std::shared_ptr<const RecordedTarget> target);
};

const char *target_kind_name(TargetKind kind);

/// A FunctionalSpec resolved on a particular mesh: nodal target values at
/// every time level. Recorded trajectories are transferred by barycentric
/// interpolation at the matrix-side nodes (point location prefers matrix
/// triangles of the reference mesh); inclusion nodes get 0 since the
/// functional only sees the matrix region.
class TrackingTarget {
public:
  TrackingTarget(const InterfaceMesh &mesh, const FunctionalSpec &spec, const TimeGrid &grid,
                 double boundary_temperature);

  TargetKind kind() const { return kind_; }
  /// Target nodal vector at time level k.
  Eigen::VectorXd at(int k) const;

private:
  TargetKind kind_;
  Eigen::Index size_;
  double value_ = 0.0;
  std::vector<Eigen::VectorXd> fields_;
};

/// Backward Euler for the forward and adjoint problems on one mesh. The
/// operator M + dt (K + B) is factorized once at construction and shared by
/// both directions.
class TransientSolver {
public:
  TransientSolver(const SystemOperators &ops, const TimeGrid &grid);

  /// (M + dt(K+B)) u^{k+1} = M u^k with u = boundary_temperature on the
  /// heated side, u^0 = 0. Throws SolverError naming the step on a
  /// non-finite result.
  Trajectory forward(double boundary_temperature) const;

  /// (M + dt(K+B)) g^k = M g^{k+1} + dt M_S (u^k - target^k), k = N-1..0,
  /// g^N = 0, homogeneous on the heated side.
  Trajectory adjoint(const Trajectory &u, const TrackingTarget &target) const;

  const TimeGrid &grid() const { return grid_; }
  const SystemOperators &operators() const { return *ops_; }

private:
  const SystemOperators *ops_;
  TimeGrid grid_;
  ConstrainedSystem system_;
};

Trajectory solve_forward(const SystemOperators &ops, const TimeGrid &grid,
                         const PhysicalParams &params);
Trajectory solve_adjoint(const SystemOperators &ops, const TimeGrid &grid,
                         const TrackingTarget &target, const Trajectory &u);

/// J = sum_{k=1..N} dt (u^k - target^k)^T M_S (u^k - target^k).
double evaluate_J(const Trajectory &u, const TrackingTarget &target, const SystemOperators &ops);

/// ||u^k - shift||_M for k = 0..N.
std::vector<double> energy_history(const Trajectory &u, const SparseMatrix &M, double shift);

} // namespace heatshape
