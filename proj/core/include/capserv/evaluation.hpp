#pragma once

#include <string>
#include <utility>
#include <vector>

#include "capserv/control.hpp"
#include "capserv/datagen.hpp"
#include "capserv/limb_profiles.hpp"
#include "capserv/mlp.hpp"
#include "capserv/window.hpp"

namespace capserv {

struct EvalSample {
  Vec4 truth;
  Vec4 pred;
};

/// Windows a dataset and runs the estimator over every window.
std::vector<EvalSample> evaluate_windows(const WindowedData& data, const MlpModel& model);
std::vector<EvalSample> evaluate_dataset(const Dataset& dataset, const MlpModel& model);

enum class HeatmapKind {
  translational,  // 1 cm cells over (dy, dz), +-1.5 cm window, D-bar error
  rotational,     // 2 deg cells over (ty, tz), +-3 deg window, theta-bar error
};

struct HeatmapCell {
  double center_a = 0.0;
  double center_b = 0.0;
  double mean_error = 0.0;  // meaningless when count == 0 (cell is empty)
  int count = 0;
};

struct BandSummary {
  double lo = 0.0;
  double hi = 0.0;
  double mean_error = 0.0;
  int count = 0;
};

struct HeatmapGrid {
  HeatmapKind kind = HeatmapKind::translational;
  double cell_size = 1.0;
  double window_half_width = 1.5;
  std::vector<HeatmapCell> cells;  // cells with count == 0 are empty, never zero-filled
  std::vector<BandSummary> bands;  // radial summaries: <=10, 10-15, >15 cm (or <30, 30-45 deg)
};

/// Aggregates per-sample estimation error onto the evaluation grid. Each cell
/// averages the samples whose true pose lies within the cell's half-width
/// window; radial bands summarize the same samples by distance (or angle)
/// from the limb.
HeatmapGrid range_heatmap(const std::vector<EvalSample>& samples, HeatmapKind kind);

struct LimbErrorRow {
  std::string station;
  PoseErrorStats stats;
};

/// Per-station pose estimation error table plus an "average" row.
std::vector<LimbErrorRow> per_limb_error_table(
    const MlpModel& model, const std::vector<std::pair<std::string, const Dataset*>>& datasets);

struct CrossSizeEntry {
  double radius_cm = 0.0;
  Vec4 mae = Vec4::Zero();  // cm, cm, deg, deg
};

struct CrossSizeReport {
  double train_radius_cm = 0.0;
  Vec4 in_dist_mae = Vec4::Zero();  // validation error of the trained model
  std::vector<CrossSizeEntry> entries;
};

/// Trains an estimator on a cylinder of one radius and evaluates it on
/// held-out radii, reporting per-axis MAE per size.
CrossSizeReport cross_size_eval(double train_radius_cm, const std::vector<double>& test_radii,
                                const CollectionSpec& spec, const SensorArraySpec& sensor,
                                const CapModelParams& params, const TrainConfig& train_cfg,
                                std::uint64_t seed);

struct TaskSpec {
  TaskKind task = TaskKind::bent_elbow;
  std::vector<double> joint_angles_deg{0.0};
  int trials = 5;
  LimbSizeProfile profile = LimbSizeProfile::midpoints();
  bool distal = true;

  void validate() const;
};

struct TaskCellResult {
  TaskKind task = TaskKind::bent_elbow;
  double angle_deg = 0.0;
  int trials = 0;
  int successes = 0;
  /// Mean over successful runs of the per-run mean estimated distance
  /// ||(dy_hat, dz_hat)|| in cm; NaN when no run succeeded.
  double mean_est_distance_cm = 0.0;
  /// Fraction of control steps with clearance inside [2, 8] cm, averaged over
  /// trials (tracking metric for moving limbs).
  double clearance_in_band_fraction = 0.0;
  /// Estimated distance per control step, averaged over trials.
  std::vector<double> mean_distance_curve;
};

struct TaskSuiteResult {
  std::vector<TaskCellResult> cells;
};

/// Runs `trials` seeded servo runs per (task, angle) cell with jittered start
/// poses and reports success fractions and distance statistics.
TaskSuiteResult run_task_suite(const TaskSpec& spec, const MlpModel& model,
                               const ServoConfig& servo_cfg, const SensorArraySpec& sensor,
                               const CapModelParams& params, std::uint64_t seed);

}  // namespace capserv
