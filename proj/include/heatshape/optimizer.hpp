#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "heatshape/assembly.hpp"
#include "heatshape/mesh.hpp"
#include "heatshape/shape_gradient.hpp"
#include "heatshape/transient.hpp"

namespace heatshape {

/// Everything that defines J as a function of the disc center, apart from
/// the center itself.
struct ProblemSetup {
  PhysicalParams physics;
  double radius = 0.2;
  DomainSpec domain;
  MeshParams mesh;
  TimeGrid grid{50, 0.5};
  FunctionalSpec functional;
  /// Called after every forward solve, e.g. to audit dissipation.
  std::function<void(const InterfaceMesh &, const SystemOperators &, const Trajectory &)>
      forward_observer;

  /// Throws ContractViolation on inconsistent settings (the time grid must
  /// span the physical horizon).
  void validate() const;
  DiscGeometry disc(const Vec2 &center) const { return {center, radius}; }
};

/// Forward state on one mesh, keeping the factorization for the adjoint.
class State {
public:
  State(const ProblemSetup &setup, InterfaceMesh mesh);

  const InterfaceMesh &mesh() const { return *mesh_; }
  const SystemOperators &operators() const { return *ops_; }
  const Trajectory &forward() const { return u_; }
  const TrackingTarget &target() const { return *target_; }
  double J() const { return J_; }

  /// Adjoint solve, traces, density and center gradient.
  ShapeGradient gradient(const ProblemSetup &setup) const;
  /// Same as gradient() but also returns the adjoint trajectory.
  ShapeGradient gradient(const ProblemSetup &setup, Trajectory &adjoint) const;

private:
  std::shared_ptr<const InterfaceMesh> mesh_;
  std::shared_ptr<const SystemOperators> ops_;
  std::shared_ptr<const TransientSolver> solver_;
  std::shared_ptr<const TrackingTarget> target_;
  Trajectory u_;
  double J_ = 0.0;
};

/// Generates the mesh for `center` and solves the forward problem.
State evaluate_state(const ProblemSetup &setup, const Vec2 &center);

enum class FdMode {
  Transport, ///< perturbed meshes are the base mesh with the disc moved rigidly
  Remesh,    ///< every perturbed center is meshed from scratch
};

struct FdResult {
  Vec2 gradient = Vec2::Zero();
  std::array<double, 2> J_plus{}, J_minus{};
};

/// Central differences (J(c + delta e_i) - J(c - delta e_i)) / (2 delta).
/// Throws GeometryError when a perturbed disc is infeasible.
FdResult fd_gradient_oracle(const ProblemSetup &setup, const Vec2 &center, double delta = 1e-3,
                            FdMode mode = FdMode::Transport);

struct OptimizerConfig {
  double alpha0 = 0.1;
  int max_backtracks = 8;
  bool normalize = true;
  int max_iters = 50;
  double tol_x = 1e-3;
  double tol_J = 1e-4;
  /// Stop when the projected gradient is below this fraction of the full
  /// gradient (e.g. only a round-off lateral component is left at a bound).
  double tol_stationary = 1e-8;

  void validate() const;
};

struct HistoryRow {
  int iter = 0;
  Vec2 center = Vec2::Zero();
  double J = 0.0;
  Vec2 gradient = Vec2::Zero();
  double step = 0.0;
  int backtracks = 0;
};

enum class OptimizeStatus {
  Converged,      ///< a tolerance was met
  Stationary,     ///< the projected gradient vanished
  Stalled,        ///< no decrease after the allowed backtracks (warning)
  MaxIterations,
};

const char *status_name(OptimizeStatus status);

struct OptimizeResult {
  DiscGeometry final_geometry;
  OptimizeStatus status = OptimizeStatus::MaxIterations;
  std::string reason;
  std::vector<std::string> notes;
  std::vector<HistoryRow> history;
};

/// Projected, normalized gradient descent with backtracking on the disc
/// center. A start whose disc fits in the closed square but not in the
/// admissible box is projected first (and noted). Row 0 of the history is
/// the initial point; every later row is an accepted iterate. `progress` (optional) sees each row as it is added.
OptimizeResult optimize(const ProblemSetup &setup, const Vec2 &initial_center,
                        const OptimizerConfig &config,
                        const std::function<void(const HistoryRow &)> &progress = {});

/// Zeroes the components of `direction` that would leave the admissible box
/// at a center sitting on its boundary.
Vec2 project_direction(const Vec2 &center, const Vec2 &direction, double radius, double margin);

} // namespace heatshape
