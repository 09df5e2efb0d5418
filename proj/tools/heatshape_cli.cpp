#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "heatshape/config.hpp"
#include "heatshape/errors.hpp"
#include "heatshape/output.hpp"

namespace fs = std::filesystem;
using namespace heatshape;

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kVerification = 4 };

struct Options {
  std::string config;
  std::string out;
  bool verbose = false;
  bool flip_density_sign = false;
};

class Log {
public:
  explicit Log(bool on) : on_(on) {}
  template <class... A> void operator()(const A &...args) const {
    if (!on_) return;
    std::ostringstream os;
    (os << ... << args);
    std::cerr << os.str() << '\n';
  }

private:
  bool on_;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path output_dir(const Options &opt, const RunConfig &cfg, bool required) {
  fs::path dir = !opt.out.empty() ? fs::path(opt.out) : cfg.output_directory;
  if (dir.empty()) {
    if (required) throw ConfigError("an output path is required (--out or [output] directory)");
    dir = ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::ofstream open_text(const fs::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void write_effective_config(const fs::path &dir, const RunConfig &cfg) {
  auto out = open_text(dir / "effective_config.ini");
  out << serialize_config(cfg);
}

/// Key/value summary as a two-row CSV (header, values).
class Summary {
public:
  void add(const std::string &key, const std::string &value) {
    keys_.push_back(key);
    values_.push_back(value);
  }
  void add(const std::string &key, double v) { add(key, format_real(v)); }
  void add(const std::string &key, int v) { add(key, std::to_string(v)); }
  void add(const std::string &key, std::size_t v) { add(key, std::to_string(v)); }

  void write(const fs::path &path) const {
    auto out = open_text(path);
    CsvWriter csv(out);
    for (const auto &k : keys_) csv.field(k);
    csv.end_row();
    for (const auto &v : values_) csv.field(v);
    csv.end_row();
  }

private:
  std::vector<std::string> keys_, values_;
};

FunctionalSpec resolve_functional(const RunConfig &cfg, const ProblemSetup &base, const Log &log) {
  switch (cfg.target) {
  case TargetKind::Constant: return FunctionalSpec::constant();
  case TargetKind::Zero: return FunctionalSpec::zero();
  case TargetKind::Recorded: break;
  }
  if (!cfg.target_file.empty()) {
    log("reading recorded target ", cfg.target_file.string());
    auto target = std::make_shared<RecordedTarget>(read_target_file(cfg.target_file));
    if (!(target->trajectory.grid == cfg.grid())) {
      throw ConfigError("recorded target '" + cfg.target_file.string() +
                        "' was computed on a different time grid");
    }
    return FunctionalSpec::recorded_from(std::move(target));
  }
  log("recording target at (", cfg.reference_center.x(), ", ", cfg.reference_center.y(), ")");
  validate_geometry(base.disc(cfg.reference_center), cfg.margin);
  ProblemSetup s = base;
  s.functional = FunctionalSpec::constant();
  const State ref = evaluate_state(s, cfg.reference_center);
  return FunctionalSpec::recorded_from(
      std::make_shared<RecordedTarget>(RecordedTarget{ref.mesh(), ref.forward()}));
}

void add_run_info(Summary &s, const RunConfig &cfg) {
  s.add("center_x", cfg.center.x());
  s.add("center_y", cfg.center.y());
  s.add("radius", cfg.radius);
  s.add("target", std::string(target_kind_name(cfg.target)));
}

int cmd_solve(const Options &opt, const RunConfig &cfg) {
  const Log log(opt.verbose);
  const auto t0 = Clock::now();
  validate_geometry(cfg.geometry(), cfg.margin);
  const fs::path dir = output_dir(opt, cfg, false);
  ProblemSetup setup = cfg.setup_without_target();
  setup.functional = resolve_functional(cfg, setup, log);
  const State st = evaluate_state(setup, cfg.center);
  const Trajectory &u = st.forward();
  log("mesh: ", st.mesh().num_vertices(), " nodes, ", st.mesh().triangles.size(), " triangles");

  const auto energy = energy_history(u, st.operators().M, cfg.physics.boundary_temperature);
  bool dissipative = true;
  for (std::size_t k = 1; k < energy.size(); ++k) dissipative &= energy[k] <= energy[k - 1];
  double umin = 0.0, umax = 0.0;
  for (const auto &f : u.fields) {
    umin = std::min(umin, f.minCoeff());
    umax = std::max(umax, f.maxCoeff());
  }

  Summary s;
  add_run_info(s, cfg);
  s.add("J", st.J());
  s.add("nodes", st.mesh().num_vertices());
  s.add("triangles", st.mesh().triangles.size());
  s.add("time_steps", cfg.time_steps);
  s.add("dt", cfg.grid().dt());
  s.add("u_min", umin);
  s.add("u_max", umax);
  s.add("dissipative", std::string(dissipative ? "true" : "false"));
  if (cfg.dump_fields) dump_trajectory(dir, st.mesh(), u);
  if (!cfg.deterministic) s.add("wall_time_s", seconds_since(t0));
  s.write(dir / "summary.csv");
  write_effective_config(dir, cfg);
  std::cout << "J = " << format_real(st.J()) << '\n';
  return kOk;
}

int cmd_record_target(const Options &opt, const RunConfig &cfg) {
  const Log log(opt.verbose);
  const auto t0 = Clock::now();
  const fs::path dir = output_dir(opt, cfg, true);
  validate_geometry(cfg.geometry(), cfg.margin);
  ProblemSetup setup = cfg.setup_without_target();
  setup.functional = FunctionalSpec::constant();
  const State st = evaluate_state(setup, cfg.center);
  const fs::path file = dir / "target.bin";
  write_target_file(file, RecordedTarget{st.mesh(), st.forward()});
  log("wrote ", file.string());

  // Replay: reload, compare bitwise, and evaluate J against itself.
  auto reloaded = std::make_shared<RecordedTarget>(read_target_file(file));
  bool identical = reloaded->mesh.fingerprint() == st.mesh().fingerprint() &&
                   reloaded->trajectory.fields.size() == st.forward().fields.size();
  for (std::size_t k = 0; identical && k < reloaded->trajectory.fields.size(); ++k) {
    identical = reloaded->trajectory.fields[k] == st.forward().fields[k];
  }
  ProblemSetup replay = setup;
  replay.functional = FunctionalSpec::recorded_from(reloaded);
  const double J_self = evaluate_state(replay, cfg.center).J();
  const bool self_ok = J_self <= 1e-10 * st.J();

  Summary s;
  add_run_info(s, cfg);
  s.add("target_file", file.string());
  s.add("J_constant_target", st.J());
  s.add("J_self_replay", J_self);
  s.add("bit_identical", std::string(identical ? "true" : "false"));
  s.add("nodes", st.mesh().num_vertices());
  s.add("time_steps", cfg.time_steps);
  if (!cfg.deterministic) s.add("wall_time_s", seconds_since(t0));
  s.write(dir / "summary.csv");
  write_effective_config(dir, cfg);
  std::cout << "target written to " << file.string() << "; self replay J = " << format_real(J_self)
            << '\n';
  if (!identical || !self_ok) {
    std::cerr << "verification failed: recorded target does not replay exactly\n";
    return kVerification;
  }
  return kOk;
}

int cmd_optimize(const Options &opt, const RunConfig &cfg) {
  const Log log(opt.verbose);
  const auto t0 = Clock::now();
  const fs::path dir = output_dir(opt, cfg, false);
  ProblemSetup setup = cfg.setup_without_target();
  setup.functional = resolve_functional(cfg, setup, log);

  std::vector<double> times;
  const OptimizeResult r = optimize(setup, cfg.center, cfg.optimizer, [&](const HistoryRow &h) {
    times.push_back(seconds_since(t0));
    log("iter ", h.iter, ": c = (", format_real(h.center.x()), ", ", format_real(h.center.y()),
        ") J = ", format_real(h.J), " backtracks ", h.backtracks);
  });
  for (const auto &note : r.notes) std::cerr << "note: " << note << '\n';
  if (r.status == OptimizeStatus::Stalled) std::cerr << "warning: " << r.reason << '\n';

  {
    auto out = open_text(dir / "history.csv");
    write_history_csv(out, r.history, cfg.deterministic ? std::vector<double>{} : times);
  }
  const Vec2 c = r.final_geometry.center;
  const State final_state = evaluate_state(setup, c);
  Trajectory adjoint;
  const ShapeGradient g = final_state.gradient(setup, adjoint);
  {
    auto out = open_text(dir / "density.csv");
    write_density_csv(out, g);
  }
  if (cfg.dump_fields) {
    dump_trajectory(dir, final_state.mesh(), final_state.forward());
    dump_trajectory(dir, final_state.mesh(), adjoint);
  }

  Summary s;
  add_run_info(s, cfg);
  s.add("status", std::string(status_name(r.status)));
  s.add("reason", r.reason);
  s.add("iterations", r.history.back().iter);
  s.add("final_x", c.x());
  s.add("final_y", c.y());
  s.add("J_initial", r.history.front().J);
  s.add("J_final", r.history.back().J);
  std::string notes;
  for (const auto &n : r.notes) notes += (notes.empty() ? "" : "; ") + n;
  s.add("notes", notes);
  if (!cfg.deterministic) s.add("wall_time_s", seconds_since(t0));
  s.write(dir / "summary.csv");
  write_effective_config(dir, cfg);
  std::cout << status_name(r.status) << " after " << r.history.back().iter << " iterations: c = ("
            << format_real(c.x()) << ", " << format_real(c.y()) << "), J = "
            << format_real(r.history.back().J) << '\n';
  return kOk;
}

int cmd_fd_check(const Options &opt, const RunConfig &cfg) {
  const Log log(opt.verbose);
  const auto t0 = Clock::now();
  validate_geometry(cfg.geometry(), cfg.margin);
  const fs::path dir = output_dir(opt, cfg, false);
  ProblemSetup setup = cfg.setup_without_target();
  setup.functional = resolve_functional(cfg, setup, log);

  const State st = evaluate_state(setup, cfg.center);
  ShapeGradient g = st.gradient(setup);
  if (opt.flip_density_sign) {
    log("debug: flipping the density sign");
    Density d = g.density;
    d.G = -d.G;
    for (auto &t : d.terms) t = -t;
    g = center_gradient(d, g.quadrature);
  }
  const FdResult fd = fd_gradient_oracle(setup, cfg.center, cfg.fd_delta, cfg.fd_mode);

  const double norm = fd.gradient.norm();
  bool pass = true;
  auto out = open_text(dir / "fd_check.csv");
  CsvWriter csv(out);
  csv.field("component").field("adjoint").field("finite_difference").field("relative_error");
  csv.field("significant").field("pass").end_row();
  for (int i = 0; i < 2; ++i) {
    const double a = g.g_center[i], f = fd.gradient[i];
    const bool significant = std::abs(f) > 1e-3 * norm;
    const double rel = std::abs(a - f) / std::max(std::abs(f), 1e-300);
    const bool ok = !significant || rel <= cfg.fd_tolerance;
    pass &= ok;
    const char *name = i == 0 ? "c_x" : "c_y";
    csv.field(name).field(a).field(f).field(rel).field(significant ? "true" : "false");
    csv.field(ok ? "true" : "false").end_row();
    std::cout << name << ": adjoint " << format_real(a) << "  fd " << format_real(f)
              << "  relative error " << format_real(rel) << (significant ? "" : " (not significant)")
              << '\n';
  }
  {
    auto dout = open_text(dir / "density.csv");
    write_density_csv(dout, g);
  }
  Summary s;
  add_run_info(s, cfg);
  s.add("J", st.J());
  s.add("fd_delta", cfg.fd_delta);
  s.add("fd_mode", std::string(cfg.fd_mode == FdMode::Transport ? "transport" : "remesh"));
  s.add("tolerance", cfg.fd_tolerance);
  s.add("pass", std::string(pass ? "true" : "false"));
  if (!cfg.deterministic) s.add("wall_time_s", seconds_since(t0));
  s.write(dir / "summary.csv");
  write_effective_config(dir, cfg);
  std::cout << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kOk : kVerification;
}

int cmd_mesh_dump(const Options &opt, const RunConfig &cfg) {
  validate_geometry(cfg.geometry(), cfg.margin);
  const fs::path dir = output_dir(opt, cfg, false);
  const InterfaceMesh mesh = generate_mesh(cfg.geometry(), cfg.mesh, {cfg.margin});
  check_mesh(mesh);
  write_vtk_file(dir / "mesh.vtk", mesh);
  Summary s;
  s.add("center_x", cfg.center.x());
  s.add("center_y", cfg.center.y());
  s.add("radius", cfg.radius);
  s.add("nodes", mesh.num_vertices());
  s.add("triangles", mesh.triangles.size());
  s.add("interface_segments", mesh.interface_edges.size());
  s.add("boundary_edges", mesh.boundary_edges.size());
  s.add("perimeter", mesh.interface_perimeter());
  s.add("area_matrix", mesh.region_area(Region::Matrix));
  s.add("area_inclusion", mesh.region_area(Region::Inclusion));
  std::ostringstream fp;
  fp << std::hex << mesh.fingerprint();
  s.add("fingerprint", fp.str());
  s.write(dir / "mesh_summary.csv");
  std::cout << mesh.num_vertices() << " nodes, " << mesh.triangles.size() << " triangles\n";
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Optimal placement of a conductive disc in a heated composite square"};
  app.require_subcommand(1);
  Options opt;

  auto add = [&](const char *name, const char *help) {
    CLI::App *sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "INI configuration file")->required();
    sub->add_option("--out", opt.out, "output directory");
    sub->add_flag("--verbose", opt.verbose, "progress on stderr");
    return sub;
  };
  CLI::App *solve = add("solve", "forward solve; writes J and optional field dumps");
  CLI::App *record = add("record-target", "solve at the configured disc and store the trajectory");
  CLI::App *opt_cmd = add("optimize", "projected gradient descent on the disc center");
  CLI::App *fd = add("fd-check", "compare the adjoint gradient with finite differences");
  fd->add_flag("--flip-density-sign", opt.flip_density_sign,
               "debug: negate the density before integrating");
  CLI::App *mesh = add("mesh-dump", "write the fitted mesh as VTK");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const RunConfig cfg = load_config(opt.config);
    if (solve->parsed()) return cmd_solve(opt, cfg);
    if (record->parsed()) return cmd_record_target(opt, cfg);
    if (opt_cmd->parsed()) return cmd_optimize(opt, cfg);
    if (fd->parsed()) return cmd_fd_check(opt, cfg);
    if (mesh->parsed()) return cmd_mesh_dump(opt, cfg);
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const GeometryError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const SolverError &e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const MeshError &e) {
    std::cerr << "mesh error: " << e.what() << '\n';
    return kSolver;
  } catch (const IoError &e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
  return kConfig;
}
