#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "capserv/geometry.hpp"
#include "capserv/sensor.hpp"
#include "capserv/types.hpp"

namespace capserv {

/// The bounded space S of end-effector poses above a limb from which targets
/// are drawn.
struct PoseBounds {
  double dy_min_cm = -10.0, dy_max_cm = 10.0;
  double dz_min_cm = 0.0, dz_max_cm = 15.0;
  double ty_min_rad = -M_PI / 8.0, ty_max_rad = M_PI / 8.0;
  double tz_min_rad = -M_PI / 8.0, tz_max_rad = M_PI / 8.0;

  bool contains(const RelativePose& p, double slack_cm = 0.0, double slack_rad = 0.0) const {
    return p.dy >= dy_min_cm - slack_cm && p.dy <= dy_max_cm + slack_cm &&
           p.dz >= dz_min_cm - slack_cm && p.dz <= dz_max_cm + slack_cm &&
           p.ty >= ty_min_rad - slack_rad && p.ty <= ty_max_rad + slack_rad &&
           p.tz >= tz_min_rad - slack_rad && p.tz <= tz_max_rad + slack_rad;
  }
};

struct SpeedBounds {
  double v_lin_min_cm_s = 3.0, v_lin_max_cm_s = 10.0;
  double v_ang_min_rad_s = M_PI / 20.0, v_ang_max_rad_s = M_PI / 8.0;
};

/// One place to collect data: a limb model plus a station along one of its
/// segments where the sensor starts.
struct LimbStation {
  std::string name;
  LimbModel limb;
  int segment_index = 0;
  double station_cm = 0.0;
};

struct CollectionSpec {
  int trajectories_per_station = 60;
  double capture_rate_hz = 100.0;  // tau
  PoseBounds pose_space;
  SpeedBounds speeds;
  // Convergence tolerances for reaching a target pose, per component.
  double pos_tolerance_cm = 0.1;
  double ang_tolerance_rad = 0.01;
};

struct DatasetProvenance {
  std::uint64_t seed = 0;
  std::string spec_hash;
  std::string description;
  int aborted_trajectories = 0;
};

struct Dataset {
  std::vector<TrajectoryRecording> trajectories;
  DatasetProvenance provenance;

  std::size_t total_steps() const {
    std::size_t n = 0;
    for (const auto& t : trajectories) n += t.steps.size();
    return n;
  }
};

/// Uniform draw of a target pose from S.
RelativePose sample_target(const PoseBounds& bounds, std::mt19937_64& rng);

/// Random end-effector excursions above a limb station: starting from the
/// rest pose (0, 0, 0, 0), repeatedly draw a target in S and translational /
/// rotational speeds, then step toward it at the capture rate recording
/// (capacitance, pose) pairs until every component converges. Position and
/// orientation clamp independently as each reaches its target. Trajectories
/// that would contact the limb are aborted, logged, and restarted from rest.
Dataset collect_trajectories(const CollectionSpec& spec, const LimbStation& station,
                             const SensorArraySpec& sensor, const CapModelParams& params,
                             std::mt19937_64& rng);

/// Straight-line retreats used to probe translational sensing range: start
/// centered 3 cm above the limb, move in a random upper-half-plane direction
/// within the lateral/vertical plane at constant speed, orientation held
/// parallel, until the sensor is 20 cm from the surface point.
Dataset linear_sweep(const LimbStation& station, const SensorArraySpec& sensor,
                     const CapModelParams& params, int n_runs, std::mt19937_64& rng,
                     double capture_rate_hz = 100.0);

/// Rotational analog: hold position 5 cm above the limb and rotate about the
/// pitch/yaw axes in a random direction until the offset reaches 45 degrees.
Dataset rotation_sweep(const LimbStation& station, const SensorArraySpec& sensor,
                       const CapModelParams& params, int n_runs, std::mt19937_64& rng,
                       double capture_rate_hz = 100.0);

}  // namespace capserv
