#include "heatshape/output.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

#include "heatshape/errors.hpp"

namespace heatshape {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvWriter::quote(const std::string &text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

CsvWriter &CsvWriter::field(const std::string &text) {
  if (!first_) *out_ << ',';
  *out_ << quote(text);
  first_ = false;
  return *this;
}

void CsvWriter::end_row() {
  *out_ << "\r\n";
  first_ = true;
}

void write_vtk(std::ostream &out, const InterfaceMesh &mesh,
               const std::vector<PointField> &point_fields) {
  const std::size_t nv = mesh.num_vertices();
  const std::size_t nt = mesh.triangles.size();
  out << "# vtk DataFile Version 3.0\n"
      << "heatshape mesh, disc center (" << format_real(mesh.geometry.center.x()) << ", "
      << format_real(mesh.geometry.center.y()) << ") radius " << format_real(mesh.geometry.radius)
      << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const Vec2 &p : mesh.vertices) out << format_real(p.x()) << ' ' << format_real(p.y()) << " 0\n";
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto &t : mesh.triangles) out << "3 " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (std::size_t i = 0; i < nt; ++i) out << "5\n";
  out << "CELL_DATA " << nt << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (const auto &t : mesh.triangles) out << static_cast<int>(t.region) << '\n';
  if (point_fields.empty()) return;
  out << "POINT_DATA " << nv << '\n';
  for (const auto &[name, values] : point_fields) {
    if (static_cast<std::size_t>(values->size()) != nv) {
      throw ContractViolation("vtk point field '" + name + "' has the wrong length");
    }
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < values->size(); ++i) out << format_real((*values)[i]) << '\n';
  }
}

namespace {

std::ofstream open_output(const std::filesystem::path &path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void check_written(std::ostream &out, const std::filesystem::path &path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

} // namespace

void write_vtk_file(const std::filesystem::path &path, const InterfaceMesh &mesh,
                    const std::vector<PointField> &point_fields) {
  auto out = open_output(path);
  write_vtk(out, mesh, point_fields);
  check_written(out, path);
}

void dump_trajectory(const std::filesystem::path &dir, const InterfaceMesh &mesh,
                     const Trajectory &trajectory) {
  const char *kind = trajectory.kind == TrajectoryKind::Forward ? "forward" : "adjoint";
  const char *name = trajectory.kind == TrajectoryKind::Forward ? "u" : "g";
  for (std::size_t k = 0; k < trajectory.fields.size(); ++k) {
    char file[64];
    std::snprintf(file, sizeof file, "field_%s_%04zu.vtk", kind, k);
    write_vtk_file(dir / file, mesh, {{name, &trajectory.fields[k]}});
  }
}

void write_density_csv(std::ostream &out, const ShapeGradient &gradient) {
  CsvWriter csv(out);
  csv.field("arc_param").field("x").field("y").field("G");
  for (int i = 1; i <= kDensityTerms; ++i) csv.field("term" + std::to_string(i));
  csv.end_row();
  for (std::size_t q = 0; q < gradient.quadrature.size(); ++q) {
    const auto &qp = gradient.quadrature[q];
    const auto iq = static_cast<Eigen::Index>(q);
    csv.field(qp.arc_param).field(qp.point.x()).field(qp.point.y()).field(gradient.density.G[iq]);
    for (const auto &term : gradient.density.terms) csv.field(term[iq]);
    csv.end_row();
  }
}

void write_history_csv(std::ostream &out, const std::vector<HistoryRow> &history,
                       const std::vector<double> &wall_times) {
  CsvWriter csv(out);
  csv.field("iter").field("c_x").field("c_y").field("J").field("dJ_dcx").field("dJ_dcy");
  csv.field("step").field("backtracks");
  if (!wall_times.empty()) csv.field("wall_time_s");
  csv.end_row();
  for (std::size_t i = 0; i < history.size(); ++i) {
    const HistoryRow &r = history[i];
    csv.field(r.iter).field(r.center.x()).field(r.center.y()).field(r.J);
    csv.field(r.gradient.x()).field(r.gradient.y()).field(r.step).field(r.backtracks);
    if (!wall_times.empty()) csv.field(i < wall_times.size() ? wall_times[i] : 0.0);
    csv.end_row();
  }
}

namespace {

constexpr char kMagic[8] = {'H', 'S', 'T', 'A', 'R', 'G', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;

template <class T> void put(std::ostream &out, const T &v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof v);
}

template <class T> T get(std::istream &in, const std::filesystem::path &path) {
  T v{};
  in.read(reinterpret_cast<char *>(&v), sizeof v);
  if (!in) throw IoError("truncated target file '" + path.string() + "'");
  return v;
}

} // namespace

void write_target_file(const std::filesystem::path &path, const RecordedTarget &target) {
  const InterfaceMesh &m = target.mesh;
  const Trajectory &u = target.trajectory;
  auto out = open_output(path, std::ios::out | std::ios::binary);
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put(out, m.geometry.center.x());
  put(out, m.geometry.center.y());
  put(out, m.geometry.radius);
  put(out, m.params.h);
  put(out, static_cast<std::int32_t>(m.params.interface_segments));
  put(out, static_cast<std::uint64_t>(m.vertices.size()));
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    put(out, m.vertices[i].x());
    put(out, m.vertices[i].y());
    put(out, static_cast<std::uint8_t>(m.vertex_region[i]));
  }
  put(out, static_cast<std::uint64_t>(m.triangles.size()));
  for (const auto &t : m.triangles) {
    for (int v : t.v) put(out, static_cast<std::int32_t>(v));
    put(out, static_cast<std::uint8_t>(t.region));
  }
  put(out, static_cast<std::uint64_t>(m.matrix_circle.size()));
  for (std::size_t k = 0; k < m.matrix_circle.size(); ++k) {
    put(out, static_cast<std::int32_t>(m.matrix_circle[k]));
    put(out, static_cast<std::int32_t>(m.inclusion_circle[k]));
  }
  put(out, m.fingerprint());
  put(out, static_cast<std::int32_t>(u.grid.steps));
  put(out, u.grid.horizon);
  for (const auto &f : u.fields) {
    out.write(reinterpret_cast<const char *>(f.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(f.size())));
  }
  check_written(out, path);
}

RecordedTarget read_target_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open target file '" + path.string() + "'");
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw IoError("'" + path.string() + "' is not a heatshape target file");
  }
  if (get<std::uint32_t>(in, path) != kVersion) throw IoError("unsupported target file version");

  DiscGeometry geom;
  geom.center.x() = get<double>(in, path);
  geom.center.y() = get<double>(in, path);
  geom.radius = get<double>(in, path);
  MeshParams params;
  params.h = get<double>(in, path);
  params.interface_segments = get<std::int32_t>(in, path);

  const auto nv = get<std::uint64_t>(in, path);
  constexpr std::uint64_t kLimit = 1u << 26;
  if (nv > kLimit) throw IoError("target file: implausible vertex count");
  std::vector<Vec2> vertices(nv);
  std::vector<Region> vregion(nv);
  for (std::uint64_t i = 0; i < nv; ++i) {
    vertices[i].x() = get<double>(in, path);
    vertices[i].y() = get<double>(in, path);
    vregion[i] = static_cast<Region>(get<std::uint8_t>(in, path));
  }
  const auto nt = get<std::uint64_t>(in, path);
  if (nt > kLimit) throw IoError("target file: implausible triangle count");
  std::vector<Triangle> triangles(nt);
  for (auto &t : triangles) {
    for (int &v : t.v) {
      v = get<std::int32_t>(in, path);
      if (v < 0 || static_cast<std::uint64_t>(v) >= nv) throw IoError("target file: bad vertex index");
    }
    t.region = static_cast<Region>(get<std::uint8_t>(in, path));
  }
  const auto nc = get<std::uint64_t>(in, path);
  if (nc > kLimit) throw IoError("target file: implausible circle size");
  std::vector<int> mc(nc), ic(nc);
  for (std::uint64_t k = 0; k < nc; ++k) {
    mc[k] = get<std::int32_t>(in, path);
    ic[k] = get<std::int32_t>(in, path);
    if (mc[k] < 0 || ic[k] < 0 || static_cast<std::uint64_t>(mc[k]) >= nv ||
        static_cast<std::uint64_t>(ic[k]) >= nv) {
      throw IoError("target file: bad circle vertex index");
    }
  }
  const auto fingerprint = get<std::uint64_t>(in, path);

  RecordedTarget target{finalize_mesh(geom, params, std::move(vertices), std::move(vregion),
                                      std::move(triangles), std::move(mc), std::move(ic)),
                        {}};
  if (target.mesh.fingerprint() != fingerprint) throw IoError("target file: mesh fingerprint mismatch");
  check_mesh(target.mesh);

  Trajectory &u = target.trajectory;
  u.kind = TrajectoryKind::Forward;
  u.grid.steps = get<std::int32_t>(in, path);
  u.grid.horizon = get<double>(in, path);
  if (u.grid.steps < 1 || !(u.grid.horizon > 0.0)) throw IoError("target file: bad time grid");
  u.mesh_fingerprint = fingerprint;
  for (int k = 0; k <= u.grid.steps; ++k) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(nv));
    in.read(reinterpret_cast<char *>(f.data()),
            static_cast<std::streamsize>(sizeof(double) * nv));
    if (!in) throw IoError("truncated target file '" + path.string() + "'");
    u.fields.push_back(std::move(f));
  }
  return target;
}

} // namespace heatshape
