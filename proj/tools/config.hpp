#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "capserv/datagen.hpp"
#include "capserv/evaluation.hpp"
#include "capserv/limb_profiles.hpp"
#include "capserv/mlp.hpp"
#include "capserv/sensor.hpp"

namespace capserv::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitRun = 4;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReportConfig {
  int linear_runs = 20;
  int rotation_runs = 20;
  int trials = 5;
  std::vector<std::string> tasks{"bent_elbow", "forearm_tilt", "bent_knee", "moving_limb"};
  double cross_size_train_radius_cm = 4.0;
  std::vector<double> cross_size_test_radii_cm{2.0, 2.8, 4.0, 5.2, 6.4};
};

/// Fully resolved run configuration: JSON file values merged over defaults,
/// command-line overrides on top. Unknown keys are rejected.
struct RunConfig {
  std::uint64_t master_seed = 1;
  std::string out_dir;

  SensorArraySpec sensor;
  CapModelParams cap_model;
  bool auto_noise = true;  // calibrate noise_sd at startup

  LimbSizeProfile profile = LimbSizeProfile::midpoints();

  CollectionSpec collect;
  std::vector<std::string> stations{"wrist", "forearm", "upper_arm",
                                    "ankle", "shin", "knee"};

  TrainConfig train;

  ServoConfig servo;
  std::string servo_task = "bent_elbow";
  double servo_angle_deg = 90.0;
  bool stub_estimator = false;
  bool strict = false;

  ReportConfig report;

  /// Canonical JSON of the resolved configuration (written next to outputs).
  std::string resolved_json() const;
  std::string config_hash() const;

  /// Capacitance parameters with the startup noise calibration applied.
  CapModelParams effective_cap_model() const;
};

/// Loads defaults, merges an optional JSON config file, then applies
/// key=value overrides using the same dotted paths as the file
/// (e.g. "train.epochs=5"). Throws ConfigError on unknown keys or bad values.
RunConfig load_config(const std::string& config_path,
                      const std::vector<std::string>& overrides);

}  // namespace capserv::cli
