#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "heatshape/assembly.hpp"
#include "heatshape/mesh.hpp"
#include "heatshape/transient.hpp"

namespace heatshape {

/// Side traces at the interface quadrature points. Each matrix is
/// (points x (steps + 1)); column k holds time level k. Time derivatives
/// are backward differences and their column 0 is unused (zero).
struct InterfaceTraces {
  TimeGrid grid;
  Eigen::MatrixXd u_S, u_O, g_S, g_O;
  Eigen::MatrixXd du_S, du_O, dg_S, dg_O; ///< tangential derivatives tau . grad
  Eigen::MatrixXd dtu_S, dtu_O;           ///< backward time differences
  Eigen::MatrixXd target_S;               ///< tracking target on the matrix side

  Eigen::Index points() const { return u_S.rows(); }
};

/// Traces of u and g on both sides of every interface segment, taken from
/// the matrix- and inclusion-tagged triangles owning the segment, evaluated
/// at the quadrature points. Tangential derivatives use the P1 gradient of
/// the owning triangle dotted with the quadrature tangent.
InterfaceTraces extract_traces(const InterfaceMesh &mesh,
                               const std::vector<InterfaceQuadraturePoint> &quadrature,
                               const Trajectory &u, const Trajectory &g,
                               const TrackingTarget &target);

constexpr int kDensityTerms = 6;

/// Time-integrated density and its six separate contributions:
///   1  (u_S - target)^2
///   2  2 ((kappa-1)/(kappa R^2) + 1/(r R)) (g_O - g_S)(u_O - u_S)
///   3  2 kappa (tau.grad g_O)(tau.grad u_O)
///   4  -2 (tau.grad g_S)(tau.grad u_S)
///   5  2 (d_t u_O) g_O
///   6  -2 (d_t u_S) g_S
/// each summed over k = 1..N with weight dt.
struct Density {
  Eigen::VectorXd G;
  std::array<Eigen::VectorXd, kDensityTerms> terms;
};

Density ball_density(const InterfaceTraces &traces, const PhysicalParams &params,
                     const DiscGeometry &geom);

struct ShapeGradient {
  Vec2 g_center = Vec2::Zero();
  Density density;
  std::array<Vec2, kDensityTerms> term_gradients{};
  std::vector<InterfaceQuadraturePoint> quadrature;
};

/// dJ/dc_i = sum_q w_q (e_i . n_q) G_q.
ShapeGradient center_gradient(const Density &density,
                              const std::vector<InterfaceQuadraturePoint> &quadrature);

/// Integral of f . n over the interface for a constant field f.
double translation_derivative(const Density &density,
                              const std::vector<InterfaceQuadraturePoint> &quadrature,
                              const Vec2 &f);

} // namespace heatshape
