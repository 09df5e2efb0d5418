#include "heatshape/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "heatshape/errors.hpp"
#include "heatshape/output.hpp"

namespace heatshape {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Value {
  std::string text;
  std::string where;

  [[noreturn]] void fail(const std::string &what) const {
    throw ConfigError(where + ": " + what + " (got '" + text + "')");
  }
  double real() const {
    double v = 0.0;
    const char *end = text.data() + text.size();
    const auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) fail("expected a number");
    return v;
  }
  int integer() const {
    int v = 0;
    const char *end = text.data() + text.size();
    const auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) fail("expected an integer");
    return v;
  }
  bool boolean() const {
    if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
    if (text == "false" || text == "no" || text == "off" || text == "0") return false;
    fail("expected true or false");
  }
};

using Setter = std::function<void(RunConfig &, const Value &, const std::filesystem::path &)>;

const std::map<std::string, std::map<std::string, Setter>> &schema() {
  static const std::map<std::string, std::map<std::string, Setter>> s = {
      {"geometry",
       {
           {"center_x", [](RunConfig &c, const Value &v, auto &) { c.center.x() = v.real(); }},
           {"center_y", [](RunConfig &c, const Value &v, auto &) { c.center.y() = v.real(); }},
           {"radius", [](RunConfig &c, const Value &v, auto &) { c.radius = v.real(); }},
           {"margin", [](RunConfig &c, const Value &v, auto &) { c.margin = v.real(); }},
       }},
      {"physics",
       {
           {"kappa", [](RunConfig &c, const Value &v, auto &) { c.physics.kappa = v.real(); }},
           {"resistance",
            [](RunConfig &c, const Value &v, auto &) { c.physics.resistance = v.real(); }},
           {"boundary_temperature",
            [](RunConfig &c, const Value &v, auto &) { c.physics.boundary_temperature = v.real(); }},
           {"horizon", [](RunConfig &c, const Value &v, auto &) { c.physics.horizon = v.real(); }},
       }},
      {"discretization",
       {
           {"h", [](RunConfig &c, const Value &v, auto &) { c.mesh.h = v.real(); }},
           {"interface_segments",
            [](RunConfig &c, const Value &v, auto &) { c.mesh.interface_segments = v.integer(); }},
           {"time_steps", [](RunConfig &c, const Value &v, auto &) { c.time_steps = v.integer(); }},
       }},
      {"functional",
       {
           {"target",
            [](RunConfig &c, const Value &v, auto &) {
              if (v.text == "constant") c.target = TargetKind::Constant;
              else if (v.text == "recorded") c.target = TargetKind::Recorded;
              else if (v.text == "zero") c.target = TargetKind::Zero;
              else v.fail("expected constant, recorded or zero");
            }},
           {"target_file",
            [](RunConfig &c, const Value &v, const std::filesystem::path &base) {
              const std::filesystem::path p(v.text);
              c.target_file = p.is_absolute() || base.empty() ? p : base / p;
            }},
           {"reference_center_x",
            [](RunConfig &c, const Value &v, auto &) {
              c.reference_center.x() = v.real();
              c.has_reference_center = true;
            }},
           {"reference_center_y",
            [](RunConfig &c, const Value &v, auto &) {
              c.reference_center.y() = v.real();
              c.has_reference_center = true;
            }},
       }},
      {"optimizer",
       {
           {"alpha0", [](RunConfig &c, const Value &v, auto &) { c.optimizer.alpha0 = v.real(); }},
           {"max_backtracks",
            [](RunConfig &c, const Value &v, auto &) { c.optimizer.max_backtracks = v.integer(); }},
           {"normalize",
            [](RunConfig &c, const Value &v, auto &) { c.optimizer.normalize = v.boolean(); }},
           {"max_iters",
            [](RunConfig &c, const Value &v, auto &) { c.optimizer.max_iters = v.integer(); }},
           {"tol_x", [](RunConfig &c, const Value &v, auto &) { c.optimizer.tol_x = v.real(); }},
           {"tol_J", [](RunConfig &c, const Value &v, auto &) { c.optimizer.tol_J = v.real(); }},
           {"tol_stationary",
            [](RunConfig &c, const Value &v, auto &) { c.optimizer.tol_stationary = v.real(); }},
           {"fd_delta", [](RunConfig &c, const Value &v, auto &) { c.fd_delta = v.real(); }},
           {"fd_mode",
            [](RunConfig &c, const Value &v, auto &) {
              if (v.text == "transport") c.fd_mode = FdMode::Transport;
              else if (v.text == "remesh") c.fd_mode = FdMode::Remesh;
              else v.fail("expected transport or remesh");
            }},
           {"fd_tolerance", [](RunConfig &c, const Value &v, auto &) { c.fd_tolerance = v.real(); }},
       }},
      {"output",
       {
           {"directory",
            [](RunConfig &c, const Value &v, const std::filesystem::path &base) {
              const std::filesystem::path p(v.text);
              c.output_directory = p.is_absolute() || base.empty() ? p : base / p;
            }},
           {"deterministic",
            [](RunConfig &c, const Value &v, auto &) { c.deterministic = v.boolean(); }},
           {"dump_fields", [](RunConfig &c, const Value &v, auto &) { c.dump_fields = v.boolean(); }},
       }},
  };
  return s;
}

void validate_config(const RunConfig &c, const std::string &origin) {
  auto fail = [&](const std::string &msg) { throw ConfigError(origin + ": " + msg); };
  try {
    c.physics.validate();
    c.grid().validate();
    c.optimizer.validate();
    validate_geometry(c.geometry(), 0.0);
    center_bounds(c.radius, c.margin);
  } catch (const ContractViolation &e) {
    fail(e.what());
  } catch (const GeometryError &e) {
    fail(e.what());
  }
  if (!(c.mesh.h > 0.0)) fail("discretization.h must be positive");
  if (c.mesh.interface_segments < 16 || c.mesh.interface_segments % 2 != 0) {
    fail("discretization.interface_segments must be even and at least 16");
  }
  if (!(c.fd_delta > 0.0)) fail("optimizer.fd_delta must be positive");
  if (!(c.fd_tolerance > 0.0)) fail("optimizer.fd_tolerance must be positive");
  if (c.target == TargetKind::Recorded && c.target_file.empty() && !c.has_reference_center) {
    fail("functional.target = recorded needs target_file or reference_center_x/_y");
  }
  if (c.target != TargetKind::Recorded && (!c.target_file.empty() || c.has_reference_center)) {
    fail("functional.target_file and reference_center_* only apply to target = recorded");
  }
  if (!c.target_file.empty() && c.has_reference_center) {
    fail("functional.target_file and reference_center_* are mutually exclusive");
  }
}

} // namespace

ProblemSetup RunConfig::setup_without_target() const {
  ProblemSetup s;
  s.physics = physics;
  s.radius = radius;
  s.domain.margin = margin;
  s.mesh = mesh;
  s.grid = grid();
  return s;
}

RunConfig parse_config(const std::string &text, const std::string &origin,
                       const std::filesystem::path &base_dir) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    std::string body = trim(line);
    if (body.empty() || body[0] == '#' || body[0] == ';') continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(body.substr(1, body.size() - 2));
      if (!schema().count(section)) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    const auto hash = value.find(" #");
    if (hash != std::string::npos) value = trim(value.substr(0, hash));
    if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside any section");
    const auto &keys = schema().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) {
      throw ConfigError(where + ": unknown key '" + key + "' in section [" + section + "]");
    }
    if (!seen.insert(section + "." + key).second) {
      throw ConfigError(where + ": duplicate key '" + key + "' in section [" + section + "]");
    }
    it->second(cfg, Value{value, where + ": " + section + "." + key}, base_dir);
  }
  validate_config(cfg, origin);
  return cfg;
}

RunConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string(), path.parent_path());
}

std::string serialize_config(const RunConfig &c) {
  std::ostringstream os;
  auto num = [](double v) { return format_real(v); };
  auto flag = [](bool b) { return b ? "true" : "false"; };
  os << "[geometry]\n"
     << "center_x = " << num(c.center.x()) << "\n"
     << "center_y = " << num(c.center.y()) << "\n"
     << "radius = " << num(c.radius) << "\n"
     << "margin = " << num(c.margin) << "\n\n"
     << "[physics]\n"
     << "kappa = " << num(c.physics.kappa) << "\n"
     << "resistance = " << num(c.physics.resistance) << "\n"
     << "boundary_temperature = " << num(c.physics.boundary_temperature) << "\n"
     << "horizon = " << num(c.physics.horizon) << "\n\n"
     << "[discretization]\n"
     << "h = " << num(c.mesh.h) << "\n"
     << "interface_segments = " << c.mesh.interface_segments << "\n"
     << "time_steps = " << c.time_steps << "\n\n"
     << "[functional]\n"
     << "target = " << target_kind_name(c.target) << "\n";
  if (!c.target_file.empty()) os << "target_file = " << c.target_file.string() << "\n";
  if (c.has_reference_center) {
    os << "reference_center_x = " << num(c.reference_center.x()) << "\n"
       << "reference_center_y = " << num(c.reference_center.y()) << "\n";
  }
  os << "\n[optimizer]\n"
     << "alpha0 = " << num(c.optimizer.alpha0) << "\n"
     << "max_backtracks = " << c.optimizer.max_backtracks << "\n"
     << "normalize = " << flag(c.optimizer.normalize) << "\n"
     << "max_iters = " << c.optimizer.max_iters << "\n"
     << "tol_x = " << num(c.optimizer.tol_x) << "\n"
     << "tol_J = " << num(c.optimizer.tol_J) << "\n"
     << "tol_stationary = " << num(c.optimizer.tol_stationary) << "\n"
     << "fd_delta = " << num(c.fd_delta) << "\n"
     << "fd_mode = " << (c.fd_mode == FdMode::Transport ? "transport" : "remesh") << "\n"
     << "fd_tolerance = " << num(c.fd_tolerance) << "\n\n"
     << "[output]\n";
  if (!c.output_directory.empty()) os << "directory = " << c.output_directory.string() << "\n";
  os << "deterministic = " << flag(c.deterministic) << "\n"
     << "dump_fields = " << flag(c.dump_fields) << "\n";
  return os.str();
}

} // namespace heatshape
