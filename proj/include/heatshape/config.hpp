#pragma once

#include <filesystem>
#include <string>

#include "heatshape/optimizer.hpp"

namespace heatshape {

/// Complete description of one CLI experiment, read from an INI file with
/// sections [geometry], [physics], [discretization], [functional],
/// [optimizer] and [output]. Every key is optional and defaults to the
/// values below; unknown sections or keys are rejected.
struct RunConfig {
  // [geometry]
  Vec2 center{0.5, 0.5};
  double radius = 0.2;
  double margin = 0.02;
  // [physics]
  PhysicalParams physics;
  // [discretization]
  MeshParams mesh;
  int time_steps = 50;
  // [functional]
  TargetKind target = TargetKind::Constant;
  std::filesystem::path target_file;   ///< recorded target written by record-target
  bool has_reference_center = false;   ///< record the target in-process instead
  Vec2 reference_center{0.5, 0.75};
  // [optimizer]
  OptimizerConfig optimizer;
  double fd_delta = 1e-3;
  FdMode fd_mode = FdMode::Transport;
  double fd_tolerance = 0.05;
  // [output]
  std::filesystem::path output_directory;
  bool deterministic = true;
  bool dump_fields = false;

  TimeGrid grid() const { return {time_steps, physics.horizon}; }
  DiscGeometry geometry() const { return {center, radius}; }
  /// Setup without the functional, which may need a solve or a file read.
  ProblemSetup setup_without_target() const;
};

/// Parses INI text. `origin` names the source in diagnostics, and relative
/// paths are resolved against `base_dir`. Throws ConfigError with
/// "origin:line: message" on malformed lines, duplicate or unknown keys,
/// unparsable values and values violating component invariants.
RunConfig parse_config(const std::string &text, const std::string &origin = "<config>",
                       const std::filesystem::path &base_dir = {});
RunConfig load_config(const std::filesystem::path &path);

/// INI text with every key, floats at 17 significant digits; parsing it
/// back yields an identical RunConfig.
std::string serialize_config(const RunConfig &config);

} // namespace heatshape
