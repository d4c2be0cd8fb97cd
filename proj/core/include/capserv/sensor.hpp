#pragma once

#include <random>

#include "capserv/geometry.hpp"
#include "capserv/types.hpp"

namespace capserv {

/// Geometry of the 3x2 electrode array on its mounting plate. Columns spread
/// along the plate's lateral (+Y) axis, rows along the travel (+X) axis; the
/// plate senses downward (-Z in the plate frame).
struct SensorArraySpec {
  double electrode_size_cm = 3.0;
  int cols = 3;
  int rows = 2;
  double plate_width_cm = 11.5;       // lateral extent
  double plate_depth_cm = 8.5;        // longitudinal extent
  double pitch_lateral_cm = 3.75;     // column center spacing
  double pitch_longitudinal_cm = 4.5; // row center spacing
  Vec3 mount_translation = Vec3::Zero();  // ee frame -> plate center
  Vec3 mount_rpy = Vec3::Zero();

  void validate() const;
};

/// Parameters of the synthetic capacitance model: a patch-summed 1/d response
/// with near-field clamp and far-field cutoff, uniform mean-mixing crosstalk,
/// and additive Gaussian noise.
struct CapModelParams {
  double gain = 1.0;          // capacitance unit * cm
  double baseline = 1.0;      // capacitance unit, >= 0
  double noise_sd = 0.0;      // capacitance unit, >= 0
  double crosstalk = 0.05;    // in [0, 0.2]
  int patch_resolution = 6;   // patches per electrode edge
  double range_cutoff_cm = 40.0;

  void validate() const;
};

/// Near-field clamp: patch contributions saturate below this distance.
inline constexpr double kMinPatchDistance = 0.3;  // cm

struct ElectrodeLayout {
  std::array<Vec3, kNumElectrodes> centers;  // world frame
  Vec3 normal;                               // sensing direction
};

/// World-frame electrode centers and plate normal for a given ee pose.
ElectrodeLayout electrode_centers(const SensorArraySpec& spec, const EEPose& ee);

struct CapSample {
  CapFrame frame;
  double min_clearance_cm = 0.0;  // smallest patch clearance seen
};

/// Raw capacitance plus the minimum patch clearance, without the contact
/// precondition; used by the servo loop, which needs readings during light
/// contact to drive its force monitor.
CapSample capacitance_with_clearance(const SensorArraySpec& spec,
                                     const CapModelParams& params,
                                     const LimbModel& limb, const EEPose& ee,
                                     double t, std::mt19937_64* noise_rng);

/// One simulated frame. Throws ContactError if any patch clearance <= 0.
CapFrame simulate_capacitance(const SensorArraySpec& spec, const CapModelParams& params,
                              const LimbModel& limb, const EEPose& ee, double t,
                              std::mt19937_64& rng);

/// Smallest signed clearance over the sensor patch grid; negative when the
/// plate penetrates the limb. Drives the contact force monitor.
double min_patch_clearance(const SensorArraySpec& spec, int patch_resolution,
                           const LimbModel& limb, const EEPose& ee, double t);

/// One-pole smoothing y_t = 0.98 y_{t-1} + 0.02 x_t followed by per-electrode
/// min-max normalization to [0, 1]. Plot pipeline only; never feeds the
/// estimator.
std::vector<CapFrame> smooth_for_plotting(const std::vector<CapFrame>& series);

/// Zero-noise reading of the top-center electrode 5 cm above a 3 cm-radius
/// cylinder; the default noise level is 0.5% of this, calibrated once at
/// startup.
double calibration_reading(const SensorArraySpec& spec, const CapModelParams& params);

/// params with noise_sd set to the calibrated default.
CapModelParams with_calibrated_noise(const SensorArraySpec& spec, CapModelParams params);

}  // namespace capserv
