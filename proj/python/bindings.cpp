#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "heatshape/config.hpp"
#include "heatshape/errors.hpp"
#include "heatshape/output.hpp"

namespace py = pybind11;
using namespace heatshape;

namespace {

Vec2 to_vec(const std::array<double, 2> &c) { return {c[0], c[1]}; }

Eigen::MatrixXd vertices_array(const InterfaceMesh &m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.num_vertices()), 2);
  for (std::size_t i = 0; i < m.num_vertices(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.vertices[i];
  return out;
}

Eigen::MatrixXi triangles_array(const InterfaceMesh &m) {
  Eigen::MatrixXi out(static_cast<Eigen::Index>(m.triangles.size()), 3);
  for (std::size_t i = 0; i < m.triangles.size(); ++i) {
    for (int j = 0; j < 3; ++j) out(static_cast<Eigen::Index>(i), j) = m.triangles[i].v[j];
  }
  return out;
}

Eigen::VectorXi regions_array(const InterfaceMesh &m) {
  Eigen::VectorXi out(static_cast<Eigen::Index>(m.triangles.size()));
  for (std::size_t i = 0; i < m.triangles.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = static_cast<int>(m.triangles[i].region);
  }
  return out;
}

/// Python-facing problem: a ProblemSetup plus the functional choice.
class Problem {
public:
  Problem(double kappa, double resistance, double boundary_temperature, double horizon, double radius,
          double h, int interface_segments, int time_steps, double margin, const std::string &target) {
    setup_.physics = {kappa, resistance, boundary_temperature, horizon};
    setup_.radius = radius;
    setup_.mesh = {h, interface_segments};
    setup_.grid = {time_steps, horizon};
    setup_.domain.margin = margin;
    set_target(target);
    setup_.validate();
  }

  static Problem from_config(const RunConfig &cfg) {
    Problem p(cfg.physics.kappa, cfg.physics.resistance, cfg.physics.boundary_temperature,
              cfg.physics.horizon, cfg.radius, cfg.mesh.h, cfg.mesh.interface_segments, cfg.time_steps,
              cfg.margin, cfg.target == TargetKind::Zero ? "zero" : "constant");
    if (cfg.target == TargetKind::Recorded) {
      if (!cfg.target_file.empty()) {
        p.setup_.functional = FunctionalSpec::recorded_from(
            std::make_shared<RecordedTarget>(read_target_file(cfg.target_file)));
      } else {
        p.record_target({cfg.reference_center.x(), cfg.reference_center.y()});
      }
    }
    return p;
  }

  void set_target(const std::string &target) {
    if (target == "constant") setup_.functional = FunctionalSpec::constant();
    else if (target == "zero") setup_.functional = FunctionalSpec::zero();
    else throw ConfigError("target must be 'constant' or 'zero'; attach a recorded one with record_target or load_target");
  }

  void record_target(const std::array<double, 2> &center) {
    ProblemSetup plain = setup_;
    plain.functional = FunctionalSpec::constant();
    const State ref = evaluate_state(plain, to_vec(center));
    setup_.functional = FunctionalSpec::recorded_from(
        std::make_shared<RecordedTarget>(RecordedTarget{ref.mesh(), ref.forward()}));
  }

  void load_target(const std::filesystem::path &path) {
    setup_.functional =
        FunctionalSpec::recorded_from(std::make_shared<RecordedTarget>(read_target_file(path)));
  }

  void save_target(const std::array<double, 2> &center, const std::filesystem::path &path) const {
    ProblemSetup plain = setup_;
    plain.functional = FunctionalSpec::constant();
    const State ref = evaluate_state(plain, to_vec(center));
    write_target_file(path, {ref.mesh(), ref.forward()});
  }

  py::dict solve(const std::array<double, 2> &center) const {
    const State st = evaluate_state(setup_, to_vec(center));
    py::dict d;
    d["J"] = st.J();
    d["nodes"] = st.mesh().num_vertices();
    d["triangles"] = st.mesh().triangles.size();
    d["final_field"] = st.forward().fields.back();
    d["energy"] = energy_history(st.forward(), st.operators().M, setup_.physics.boundary_temperature);
    return d;
  }

  py::dict gradient(const std::array<double, 2> &center) const {
    const State st = evaluate_state(setup_, to_vec(center));
    const ShapeGradient g = st.gradient(setup_);
    py::dict d;
    d["J"] = st.J();
    d["gradient"] = Eigen::Vector2d(g.g_center);
    d["density"] = g.density.G;
    Eigen::MatrixXd terms(g.density.G.size(), kDensityTerms);
    Eigen::MatrixXd term_gradients(kDensityTerms, 2);
    for (int i = 0; i < kDensityTerms; ++i) {
      terms.col(i) = g.density.terms[static_cast<std::size_t>(i)];
      term_gradients.row(i) = g.term_gradients[static_cast<std::size_t>(i)];
    }
    d["terms"] = terms;
    d["term_gradients"] = term_gradients;
    Eigen::VectorXd arc(static_cast<Eigen::Index>(g.quadrature.size()));
    for (std::size_t q = 0; q < g.quadrature.size(); ++q) arc[static_cast<Eigen::Index>(q)] = g.quadrature[q].arc_param;
    d["arc_param"] = arc;
    return d;
  }

  Eigen::Vector2d fd_gradient(const std::array<double, 2> &center, double delta, const std::string &mode) const {
    if (mode != "transport" && mode != "remesh") throw ConfigError("mode must be 'transport' or 'remesh'");
    return fd_gradient_oracle(setup_, to_vec(center), delta, mode == "remesh" ? FdMode::Remesh : FdMode::Transport)
        .gradient;
  }

  py::dict optimize(const std::array<double, 2> &center, const OptimizerConfig &cfg) const {
    const OptimizeResult r = heatshape::optimize(setup_, to_vec(center), cfg);
    Eigen::MatrixXd hist(static_cast<Eigen::Index>(r.history.size()), 8);
    for (std::size_t i = 0; i < r.history.size(); ++i) {
      const HistoryRow &h = r.history[i];
      hist.row(static_cast<Eigen::Index>(i)) << h.iter, h.center.x(), h.center.y(), h.J, h.gradient.x(),
          h.gradient.y(), h.step, h.backtracks;
    }
    py::dict d;
    d["center"] = Eigen::Vector2d(r.final_geometry.center);
    d["status"] = std::string(status_name(r.status));
    d["reason"] = r.reason;
    d["notes"] = r.notes;
    d["history"] = hist;
    d["history_columns"] = std::vector<std::string>{"iter", "c_x", "c_y", "J", "dJ_dcx", "dJ_dcy", "step", "backtracks"};
    return d;
  }

  const ProblemSetup &setup() const { return setup_; }

private:
  ProblemSetup setup_;
};

} // namespace

PYBIND11_MODULE(_heatshape, m) {
  m.doc() = "Optimal placement of a conductive disc in a heated two-material square";

  auto base = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<MeshError>(m, "MeshError", PyExc_RuntimeError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  (void)base;

  py::class_<InterfaceMesh>(m, "Mesh")
      .def_property_readonly("vertices", &vertices_array)
      .def_property_readonly("triangles", &triangles_array)
      .def_property_readonly("regions", &regions_array, "0 matrix, 1 inclusion, per triangle")
      .def_property_readonly("perimeter", &InterfaceMesh::interface_perimeter)
      .def_property_readonly("matrix_area", [](const InterfaceMesh &mm) { return mm.region_area(Region::Matrix); })
      .def_property_readonly("inclusion_area",
                             [](const InterfaceMesh &mm) { return mm.region_area(Region::Inclusion); })
      .def_property_readonly("fingerprint", &InterfaceMesh::fingerprint)
      .def("check", &check_mesh)
      .def("write_vtk", [](const InterfaceMesh &mm, const std::filesystem::path &p) { write_vtk_file(p, mm); })
      .def("__len__", &InterfaceMesh::num_vertices);

  m.def(
      "generate_mesh",
      [](const std::array<double, 2> &center, double radius, double h, int interface_segments, double margin) {
        return generate_mesh({to_vec(center), radius}, {h, interface_segments}, {margin});
      },
      py::arg("center"), py::arg("radius") = 0.2, py::arg("h") = 0.02, py::arg("interface_segments") = 64,
      py::arg("margin") = 0.02);

  m.def("project_center",
        [](const std::array<double, 2> &c, double r, double margin) {
          return Eigen::Vector2d(project_center(to_vec(c), r, margin));
        },
        py::arg("center"), py::arg("radius") = 0.2, py::arg("margin") = 0.02);

  py::class_<OptimizerConfig>(m, "OptimizerConfig")
      .def(py::init<>())
      .def_readwrite("alpha0", &OptimizerConfig::alpha0)
      .def_readwrite("max_backtracks", &OptimizerConfig::max_backtracks)
      .def_readwrite("normalize", &OptimizerConfig::normalize)
      .def_readwrite("max_iters", &OptimizerConfig::max_iters)
      .def_readwrite("tol_x", &OptimizerConfig::tol_x)
      .def_readwrite("tol_J", &OptimizerConfig::tol_J)
      .def_readwrite("tol_stationary", &OptimizerConfig::tol_stationary);

  py::class_<Problem>(m, "Problem")
      .def(py::init<double, double, double, double, double, double, int, int, double, const std::string &>(),
           py::arg("kappa") = 100.0, py::arg("resistance") = 1e-2, py::arg("boundary_temperature") = 500.0,
           py::arg("horizon") = 0.5, py::arg("radius") = 0.2, py::arg("h") = 0.02,
           py::arg("interface_segments") = 64, py::arg("time_steps") = 50, py::arg("margin") = 0.02,
           py::arg("target") = "constant")
      .def_static("from_config", [](const std::filesystem::path &p) { return Problem::from_config(load_config(p)); })
      .def("record_target", &Problem::record_target, py::arg("center"),
           "Use the forward trajectory of a disc at `center` as the tracking target.")
      .def("save_target", &Problem::save_target, py::arg("center"), py::arg("path"))
      .def("load_target", &Problem::load_target, py::arg("path"))
      .def("solve", &Problem::solve, py::arg("center"))
      .def("gradient", &Problem::gradient, py::arg("center"))
      .def("fd_gradient", &Problem::fd_gradient, py::arg("center"), py::arg("delta") = 1e-3,
           py::arg("mode") = "transport")
      .def("optimize", &Problem::optimize, py::arg("center"), py::arg("config") = OptimizerConfig{})
      .def_property_readonly("target", [](const Problem &p) {
        return std::string(target_kind_name(p.setup().functional.kind));
      });
}
