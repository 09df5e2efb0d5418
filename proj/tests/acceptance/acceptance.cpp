// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "heatshape/errors.hpp"
#include "heatshape/optimizer.hpp"

using namespace heatshape;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(bool ok, const std::string &id, const std::string &detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool exactly_symmetric(const SparseMatrix &A) {
  const SparseMatrix D = A - SparseMatrix(A.transpose());
  for (int k = 0; k < D.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(D, k); it; ++it) {
      if (it.value() != 0.0) return false;
    }
  }
  return true;
}

/// Per-solve audit of the operator and interface properties.
struct Audit {
  int solves = 0;
  int meshes = 0;
  int asymmetric = 0;
  int cholesky_failures = 0;
  int dissipation_steps = 0;
  int dissipation_violations = 0;
  double worst_energy_increase = 0.0;
  double worst_jump_energy_error = 0.0;
  double worst_normal_integral = 0.0;

  void operator()(const InterfaceMesh &mesh, const SystemOperators &ops, const Trajectory &u,
                  double boundary_temperature, double resistance) {
    ++solves;
    const auto e = energy_history(u, ops.M, boundary_temperature);
    for (std::size_t k = 1; k < e.size(); ++k) {
      ++dissipation_steps;
      if (e[k] > e[k - 1]) {
        ++dissipation_violations;
        worst_energy_increase = std::max(worst_energy_increase, e[k] - e[k - 1]);
      }
    }
    if (mesh.fingerprint() == last_mesh_) return;
    last_mesh_ = mesh.fingerprint();
    ++meshes;
    if (!exactly_symmetric(ops.M) || !exactly_symmetric(ops.K) || !exactly_symmetric(ops.B)) ++asymmetric;
    try {
      ConstrainedSystem(ops.K + ops.B, ops.dirichlet_nodes);
    } catch (const SolverError &) {
      ++cholesky_failures;
    }
    Eigen::VectorXd z = Eigen::VectorXd::Zero(ops.size());
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
      if (mesh.vertex_region[i] == Region::Inclusion) z[static_cast<Eigen::Index>(i)] = 1.0;
    }
    const double expected = mesh.interface_perimeter() / resistance;
    worst_jump_energy_error = std::max(worst_jump_energy_error, std::abs(z.dot(ops.B * z) - expected));
    Vec2 flux = Vec2::Zero();
    for (const auto &q : interface_quadrature(mesh)) flux += q.weight * q.normal;
    worst_normal_integral = std::max(worst_normal_integral, flux.cwiseAbs().maxCoeff());
  }

private:
  std::uint64_t last_mesh_ = 0;
};

ProblemSetup base_setup(Audit &audit, MeshParams mesh = {0.02, 64}, int steps = 50) {
  ProblemSetup s;
  s.physics = {100.0, 1e-2, 500.0, 0.5};
  s.radius = 0.2;
  s.mesh = mesh;
  s.grid = {steps, 0.5};
  s.forward_observer = [&audit, p = s.physics](const InterfaceMesh &m, const SystemOperators &ops,
                                               const Trajectory &u) {
    audit(m, ops, u, p.boundary_temperature, p.resistance);
  };
  return s;
}

FunctionalSpec recorded_at(const ProblemSetup &s, const Vec2 &c) {
  ProblemSetup plain = s;
  plain.functional = FunctionalSpec::constant();
  const State ref = evaluate_state(plain, c);
  return FunctionalSpec::recorded_from(
      std::make_shared<RecordedTarget>(RecordedTarget{ref.mesh(), ref.forward()}));
}

std::string trace(const OptimizeResult &r) {
  std::string out;
  for (const auto &h : r.history) out += fmt(" (%.4f,%.4f)", h.center.x(), h.center.y());
  return out;
}

void criterion_validation(Audit &audit) {
  const auto t0 = Clock::now();
  ProblemSetup s = base_setup(audit);
  s.functional = recorded_at(s, {0.5, 0.75});
  const OptimizeResult r = optimize(s, {0.5, 0.2}, OptimizerConfig{});
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const Vec2 c = r.final_geometry.center;
  const int iters = r.history.back().iter;
  const bool ok = std::abs(c.y() - 0.75) <= 2e-2 && iters <= 15 && secs <= 600.0;
  report(ok, "1 validation",
         fmt("final (%.6f, %.6f), |c_y-0.75| = %.2e, %d iterations, %s, %.1f s;", c.x(), c.y(),
             std::abs(c.y() - 0.75), iters, status_name(r.status), secs) +
             trace(r));
}

struct FdCase {
  const char *name;
  TargetKind kind;
  Vec2 center;
};

double fd_error(Audit &audit, const FdCase &fc, MeshParams mesh, int steps, std::string &detail) {
  ProblemSetup s = base_setup(audit, mesh, steps);
  if (fc.kind == TargetKind::Recorded) s.functional = recorded_at(s, {0.5, 0.75});
  if (fc.kind == TargetKind::Zero) s.functional = FunctionalSpec::zero();
  const Vec2 adj = evaluate_state(s, fc.center).gradient(s).g_center;
  const Vec2 fd = fd_gradient_oracle(s, fc.center, 1e-3).gradient;
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    if (std::abs(fd[i]) <= 1e-3 * fd.norm()) continue;
    worst = std::max(worst, std::abs(adj[i] - fd[i]) / std::abs(fd[i]));
  }
  detail += fmt(" h=%.3g: adjoint (%.6g, %.6g) fd (%.6g, %.6g) err %.3f%%;", mesh.h, adj.x(), adj.y(),
                fd.x(), fd.y(), 100 * worst);
  return worst;
}

void criterion_gradient(Audit &audit) {
  const FdCase cases[] = {{"constant", TargetKind::Constant, {0.5, 0.5}},
                          {"recorded", TargetKind::Recorded, {0.5, 0.35}},
                          {"zero", TargetKind::Zero, {0.5, 0.3}}};
  for (const FdCase &fc : cases) {
    std::string detail;
    const double coarse = fd_error(audit, fc, {0.02, 64}, 50, detail);
    const double fine = fd_error(audit, fc, {0.01, 128}, 100, detail);
    const bool ok = coarse <= 0.05 && fine <= 0.05 && fine < coarse;
    report(ok, std::string("2 gradient fidelity (") + fc.name + ")", detail.substr(1));
  }
}

void criterion_symmetry(Audit &audit) {
  ProblemSetup s = base_setup(audit);
  s.functional = FunctionalSpec::constant();
  const OptimizeResult left = optimize(s, {0.25, 0.75}, OptimizerConfig{});
  const OptimizeResult right = optimize(s, {0.75, 0.75}, OptimizerConfig{});
  const Vec2 a = left.final_geometry.center, b = right.final_geometry.center;
  double mirror = left.history.size() == right.history.size() ? 0.0 : 1.0;
  for (std::size_t i = 0; i < std::min(left.history.size(), right.history.size()); ++i) {
    const Vec2 &l = left.history[i].center, &r = right.history[i].center;
    mirror = std::max({mirror, std::abs(l.x() + r.x() - 1.0), std::abs(l.y() - r.y())});
  }
  const bool ok = std::abs(a.x() - 0.5) <= 2e-2 && std::abs(b.x() - 0.5) <= 2e-2 &&
                  std::abs(a.y() - b.y()) <= 2e-2 && a.y() < 0.5 && b.y() < 0.5;
  report(ok, "3 symmetry",
         fmt("left start -> (%.6f, %.6f) [%s], right start -> (%.6f, %.6f) [%s], max mirror deviation "
             "of the histories %.1e;",
             a.x(), a.y(), status_name(left.status), b.x(), b.y(), status_name(right.status), mirror) +
             " left" + trace(left) + "; right" + trace(right));
}

void criterion_mean_temperature(Audit &audit) {
  ProblemSetup s = base_setup(audit);
  s.functional = FunctionalSpec::zero();
  const OptimizeResult r = optimize(s, {0.5, 0.25}, OptimizerConfig{});
  bool monotone = r.history.size() >= 2;
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    monotone &= r.history[i].center.y() > r.history[i - 1].center.y();
  }
  const Vec2 c = r.final_geometry.center;
  report(monotone && c.y() > 0.5, "4 mean temperature",
         fmt("c_y strictly increasing: %s, final (%.6f, %.6f) [%s];", monotone ? "yes" : "no", c.x(), c.y(),
             status_name(r.status)) +
             trace(r));
}

bool bitwise_equal(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

void criterion_properties(Audit &audit) {
  report(audit.asymmetric == 0, "5a operator symmetry",
         fmt("M, K, B exactly symmetric on %d of %d meshes", audit.meshes - audit.asymmetric, audit.meshes));

  // PSD check of K + B through its smallest eigenvalue on a coarse mesh,
  // Cholesky after elimination on every mesh above.
  Audit scratch;
  ProblemSetup small = base_setup(scratch, {0.05, 16}, 5);
  small.domain.margin = 0.05;
  const State st = evaluate_state(small, {0.47, 0.55});
  const Eigen::MatrixXd KB = Eigen::MatrixXd(st.operators().K + st.operators().B);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(KB);
  const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
  report(lmin >= -1e-12 * lmax && audit.cholesky_failures == 0, "5b positive (semi)definiteness",
         fmt("min eig(K+B) = %.3e (max %.3e); Cholesky after elimination succeeded on %d of %d meshes", lmin,
             lmax, audit.meshes - audit.cholesky_failures, audit.meshes));

  report(audit.dissipation_violations == 0, "5c discrete dissipation",
         fmt("%d violations in %d steps over %d forward solves (worst increase %.3e)",
             audit.dissipation_violations, audit.dissipation_steps, audit.solves, audit.worst_energy_increase));

  report(audit.worst_jump_energy_error <= 1e-12, "5d constant-jump energy",
         fmt("max |z'Bz - perimeter/R| = %.3e over %d meshes", audit.worst_jump_energy_error,
             audit.meshes));

  {
    Audit a;
    ProblemSetup s = base_setup(a);
    bool same = true;
    int points = 0;
    for (const Vec2 &c : {Vec2(0.5, 0.22), Vec2(0.31, 0.64), Vec2(0.5, 0.5)}) {
      s.functional = FunctionalSpec::constant();
      const State state = evaluate_state(s, c);
      Trajectory g;
      state.gradient(s, g);
      auto q = interface_quadrature(state.mesh());
      const Density d1 =
          ball_density(extract_traces(state.mesh(), q, state.forward(), g, state.target()), s.physics,
                       state.mesh().geometry);
      for (auto &p : q) p.tangent = -p.tangent;
      const Density d2 =
          ball_density(extract_traces(state.mesh(), q, state.forward(), g, state.target()), s.physics,
                       state.mesh().geometry);
      same &= bitwise_equal(d1.G, d2.G);
      points += static_cast<int>(q.size());
    }
    report(same, "5e tangent orientation invariance", fmt("density bitwise identical at %d points", points));
  }

  {
    Audit a;
    ProblemSetup s = base_setup(a);
    s.physics.boundary_temperature = 0.0;
    bool zero = true;
    std::string detail;
    for (TargetKind kind : {TargetKind::Constant, TargetKind::Zero}) {
      s.functional = kind == TargetKind::Zero ? FunctionalSpec::zero() : FunctionalSpec::constant();
      const State state = evaluate_state(s, {0.43, 0.61});
      const ShapeGradient g = state.gradient(s);
      zero &= state.J() == 0.0 && g.g_center.norm() == 0.0;
      detail += fmt("%s target: J = %g, |grad| = %g; ", target_kind_name(kind), state.J(), g.g_center.norm());
    }
    report(zero, "5f zero boundary temperature", detail.substr(0, detail.size() - 2));
  }

  report(audit.worst_normal_integral <= 1e-12, "5g zero-mean normal",
         fmt("max |integral of e_i.n| = %.3e over %d interfaces", audit.worst_normal_integral, audit.meshes));
}

} // namespace

int main() {
  const auto t0 = Clock::now();
  Audit audit;
  try {
    criterion_validation(audit);
    criterion_gradient(audit);
    criterion_symmetry(audit);
    criterion_mean_temperature(audit);
    criterion_properties(audit);
  } catch (const std::exception &e) {
    report(false, "suite", std::string("aborted: ") + e.what());
  }
  std::printf("%s: %d failing criteria, %.1f s\n", failures == 0 ? "ALL PASS" : "FAILURES", failures,
              std::chrono::duration<double>(Clock::now() - t0).count());
  return failures == 0 ? 0 : 1;
}
