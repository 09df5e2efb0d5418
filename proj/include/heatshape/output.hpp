#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "heatshape/mesh.hpp"
#include "heatshape/optimizer.hpp"
#include "heatshape/shape_gradient.hpp"
#include "heatshape/transient.hpp"

namespace heatshape {

/// Shortest round-trip-safe text for a double: 17 significant digits.
std::string format_real(double v);

/// RFC 4180 writer: comma separated, CRLF line ends, fields quoted when
/// they contain a comma, quote or line break.
class CsvWriter {
public:
  explicit CsvWriter(std::ostream &out) : out_(&out) {}

  CsvWriter &field(const std::string &text);
  CsvWriter &field(double v) { return field(format_real(v)); }
  CsvWriter &field(int v) { return field(std::to_string(v)); }
  CsvWriter &field(std::size_t v) { return field(std::to_string(v)); }
  void end_row();

  static std::string quote(const std::string &text);

private:
  std::ostream *out_;
  bool first_ = true;
};

using PointField = std::pair<std::string, const Eigen::VectorXd *>;

/// Legacy ASCII VTK unstructured grid with a CELL_DATA "region" tag
/// (0 matrix, 1 inclusion) and optional POINT_DATA scalars.
void write_vtk(std::ostream &out, const InterfaceMesh &mesh,
               const std::vector<PointField> &point_fields = {});
void write_vtk_file(const std::filesystem::path &path, const InterfaceMesh &mesh,
                    const std::vector<PointField> &point_fields = {});

/// Writes `field_{kind}_{k:04}.vtk` for every time level into `dir`.
void dump_trajectory(const std::filesystem::path &dir, const InterfaceMesh &mesh,
                     const Trajectory &trajectory);

/// Columns arc_param, x, y, G, term1..term6; one row per quadrature point.
void write_density_csv(std::ostream &out, const ShapeGradient &gradient);

/// Columns iter, c_x, c_y, J, dJ_dcx, dJ_dcy, step, backtracks, plus
/// wall_time_s when `wall_times` is non-empty.
void write_history_csv(std::ostream &out, const std::vector<HistoryRow> &history,
                       const std::vector<double> &wall_times = {});

/// Binary container for a recorded target: mesh and forward trajectory,
/// stored as raw native doubles so a reload is bit-identical.
void write_target_file(const std::filesystem::path &path, const RecordedTarget &target);
RecordedTarget read_target_file(const std::filesystem::path &path);

} // namespace heatshape
