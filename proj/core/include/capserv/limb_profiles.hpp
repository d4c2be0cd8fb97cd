#pragma once

#include <array>
#include <random>
#include <string>

#include "capserv/control.hpp"
#include "capserv/datagen.hpp"

namespace capserv {

/// Measured circumference spans (cm) across the smallest and largest
/// participants, per station.
struct StationRange {
  const char* name;
  double circ_min_cm;
  double circ_max_cm;
};

inline constexpr std::array<StationRange, 6> kStationRanges{{
    {"wrist", 13.0, 18.0},
    {"forearm", 22.0, 29.0},
    {"upper_arm", 24.0, 30.0},
    {"ankle", 20.0, 26.0},
    {"shin", 25.0, 40.0},
    {"knee", 25.0, 37.0},
}};

/// One synthetic body: a circumference per station.
struct LimbSizeProfile {
  std::array<double, 6> circumference_cm;

  double radius_cm(int station) const { return circumference_cm[station] / (2.0 * M_PI); }
  static LimbSizeProfile midpoints();
  static LimbSizeProfile sampled(std::mt19937_64& rng);
};

/// The six data-collection stations: one long horizontal cylinder per
/// station, radius from the profile, sensor placed mid-segment.
std::vector<LimbStation> default_stations(const LimbSizeProfile& profile);

/// A single-station cylinder of explicit radius (cross-size experiments).
LimbStation cylinder_station(const std::string& name, double radius_cm);

enum class TaskKind { bent_elbow, forearm_tilt, bent_knee, moving_limb };

const char* to_string(TaskKind k);
TaskKind task_from_string(const std::string& s);

/// Builds the servo scenario for a task cell: limb geometry articulated at
/// the given angle, start pose 5 cm above the first segment, and the joint
/// arc used for success classification. start_jitter perturbs the initial
/// relative pose (applied per trial).
Scenario make_task_scenario(TaskKind task, double joint_angle_deg,
                            const LimbSizeProfile& profile,
                            const RelativePose& start_jitter = {});

/// Run length (cm of forward travel) appropriate for each task's limb.
double task_run_length_cm(TaskKind task, const LimbSizeProfile& profile);

}  // namespace capserv
