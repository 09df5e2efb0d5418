#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "heatshape/mesh.hpp"

namespace heatshape {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Material and loading constants of the two-phase heat problem.
struct PhysicalParams {
  double kappa = 100.0;                ///< conductivity ratio inclusion/matrix, > 1
  double resistance = 1e-2;            ///< interfacial thermal resistance R, > 0
  double boundary_temperature = 500.0; ///< U_M imposed on the heated side
  double horizon = 0.5;                ///< final time T

  /// Throws ContractViolation unless kappa > 1, R > 0 and T > 0.
  void validate() const;
};

/// Time-independent operators of the P1 discretization.
///   M      consistent mass over both regions
///   K      stiffness, weight 1 on matrix triangles and kappa on inclusion ones
///   B      (1/R) * jump mass on the interface, coupling duplicated vertices
///   M_matrix  mass restricted to the matrix region (tracking functional)
struct SystemOperators {
  SparseMatrix M;
  SparseMatrix K;
  SparseMatrix B;
  SparseMatrix M_matrix;
  std::vector<int> dirichlet_nodes;
  std::uint64_t mesh_fingerprint = 0;

  Eigen::Index size() const { return M.rows(); }
};

SystemOperators assemble(const InterfaceMesh &mesh, const PhysicalParams &params);

/// Gradients of the three P1 basis functions of a triangle, plus its area.
struct P1Gradients {
  std::array<Vec2, 3> grad;
  double area;
};
P1Gradients p1_gradients(const Vec2 &a, const Vec2 &b, const Vec2 &c);

/// A symmetric matrix with Dirichlet rows/columns eliminated and the free
/// block factorized by sparse Cholesky. Solves return full-length vectors
/// that equal the prescribed value on the constrained nodes exactly.
class ConstrainedSystem {
public:
  /// Throws SolverError if the free block is not positive definite.
  ConstrainedSystem(const SparseMatrix &A, const std::vector<int> &constrained);

  /// Solves A x = rhs on the free nodes with x = value on constrained nodes
  /// (the constrained block's coupling is lifted to the right-hand side).
  Eigen::VectorXd solve(const Eigen::VectorXd &rhs, double value) const;

  Eigen::Index size() const { return static_cast<Eigen::Index>(free_of_.size()); }
  const std::vector<int> &constrained() const { return constrained_; }

private:
  std::vector<int> constrained_;
  std::vector<int> free_;    // free node ids
  std::vector<int> free_of_; // node -> free index, -1 if constrained
  Eigen::VectorXd lift_;     // A_FD * 1
  Eigen::SimplicialLLT<SparseMatrix> llt_;
};

/// The backward Euler operator M + dt (K + B) with the heated side
/// constrained. The Dirichlet value is supplied per solve.
ConstrainedSystem apply_dirichlet(const SystemOperators &ops, double dt);

} // namespace heatshape
