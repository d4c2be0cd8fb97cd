#pragma once

#include <string>
#include <utility>
#include <vector>

#include "capserv/control.hpp"
#include "capserv/datagen.hpp"
#include "capserv/evaluation.hpp"
#include "capserv/mlp.hpp"
#include "capserv/types.hpp"

namespace capserv {

/// FNV-1a 64-bit content hash, hex encoded; used to content-address outputs
/// in manifests.
std::string bytes_hash_hex(const std::string& bytes);
std::string file_hash_hex(const std::string& path);

/// Capacitance stream: `t,c1,c2,c3,c4,c5,c6`, 9 significant digits.
void write_capframe_csv(const std::string& path, const std::vector<CapFrame>& frames);

/// Labeled dataset: `traj_id,t,c1..c6,dy,dz,ty,tz`.
void write_dataset_csv(const std::string& path, const Dataset& dataset);
Dataset read_dataset_csv(const std::string& path);

/// Servo log: fixed 23-column header, one row per control step.
void write_servo_log_csv(const std::string& path, const ServoLog& log);
ServoLog read_servo_log_csv(const std::string& path);

void write_loss_curve_csv(const std::string& path, const std::vector<EpochLoss>& curve);

void write_heatmap_csv(const std::string& path, const HeatmapGrid& grid);
void write_band_summary_csv(const std::string& path, const HeatmapGrid& grid);
void write_limb_error_table_csv(const std::string& path, const std::vector<LimbErrorRow>& rows);
void write_cross_size_csv(const std::string& path, const CrossSizeReport& report);
void write_task_table_csv(const std::string& path, const TaskSuiteResult& result);

/// Plot-ready long format: `x,y,value,series`.
struct LongFormatRow {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
  std::string series;
};
void write_long_format_csv(const std::string& path, const std::vector<LongFormatRow>& rows);

/// Everything needed to re-run a command bit-identically plus the hashes of
/// what it produced.
struct Manifest {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> outputs;     // file -> content hash
  std::vector<std::pair<std::string, std::string>> parameters;  // echoed key/values
};

void write_manifest(const std::string& path, const Manifest& manifest);

}  // namespace capserv
