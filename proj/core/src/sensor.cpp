#include "capserv/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace capserv {

namespace {

Mat3 rpy_rotation(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

// Column centers: left (+Y), center, right (-Y); row centers: top (+X),
// bottom (-X). Order: TL, TC, TR, BL, BC, BR.
std::array<Eigen::Vector2d, kNumElectrodes> electrode_grid(const SensorArraySpec& spec) {
  const double px = spec.pitch_longitudinal_cm / 2.0;
  const double py = spec.pitch_lateral_cm;
  return {Eigen::Vector2d(px, py),  Eigen::Vector2d(px, 0.0),  Eigen::Vector2d(px, -py),
          Eigen::Vector2d(-px, py), Eigen::Vector2d(-px, 0.0), Eigen::Vector2d(-px, -py)};
}

}  // namespace

void SensorArraySpec::validate() const {
  if (cols * rows != kNumElectrodes)
    throw std::invalid_argument("SensorArraySpec: array must have exactly 6 electrodes");
  const double lateral_span = (cols - 1) * pitch_lateral_cm + electrode_size_cm;
  const double longitudinal_span = (rows - 1) * pitch_longitudinal_cm + electrode_size_cm;
  if (lateral_span > plate_width_cm + 1e-9 || longitudinal_span > plate_depth_cm + 1e-9)
    throw std::invalid_argument("SensorArraySpec: electrodes do not fit on the plate");
  if (electrode_size_cm <= 0.0 || pitch_lateral_cm <= 0.0 || pitch_longitudinal_cm <= 0.0)
    throw std::invalid_argument("SensorArraySpec: sizes must be positive");
}

void CapModelParams::validate() const {
  if (gain < 0.0 || baseline < 0.0 || noise_sd < 0.0 || range_cutoff_cm < 0.0)
    throw std::invalid_argument("CapModelParams: values must be non-negative");
  if (crosstalk < 0.0 || crosstalk > 0.2)
    throw std::invalid_argument("CapModelParams: crosstalk must lie in [0, 0.2]");
  if (patch_resolution < 1)
    throw std::invalid_argument("CapModelParams: patch_resolution must be >= 1");
}

ElectrodeLayout electrode_centers(const SensorArraySpec& spec, const EEPose& ee) {
  spec.validate();
  const Mat3 plate_rot = ee.rotation() * rpy_rotation(spec.mount_rpy);
  const Vec3 plate_center = ee.position + ee.rotation() * spec.mount_translation;

  ElectrodeLayout out;
  const auto grid = electrode_grid(spec);
  for (int i = 0; i < kNumElectrodes; ++i)
    out.centers[i] = plate_center + plate_rot * Vec3(grid[i].x(), grid[i].y(), 0.0);
  out.normal = plate_rot * -Vec3::UnitZ();
  return out;
}

CapSample capacitance_with_clearance(const SensorArraySpec& spec,
                                     const CapModelParams& params, const LimbModel& limb,
                                     const EEPose& ee, double t,
                                     std::mt19937_64* noise_rng) {
  spec.validate();
  params.validate();

  const auto segments = limb.segments_at(t);
  const Mat3 plate_rot = ee.rotation() * rpy_rotation(spec.mount_rpy);
  const Vec3 plate_center = ee.position + ee.rotation() * spec.mount_translation;
  const Vec3 ux = plate_rot.col(0);
  const Vec3 uy = plate_rot.col(1);

  const int res = params.patch_resolution;
  const double h = spec.electrode_size_cm / res;
  const double patch_area = h * h;
  const double half = spec.electrode_size_cm / 2.0;

  const auto grid = electrode_grid(spec);
  CapSample out;
  out.min_clearance_cm = std::numeric_limits<double>::infinity();

  auto patch_term = [&](const Vec3& origin, double xo, double yo) {
    const Vec3 p = origin + xo * ux + yo * uy;
    const double d = signed_clearance(segments, p);
    out.min_clearance_cm = std::min(out.min_clearance_cm, d);
    if (d > params.range_cutoff_cm) return 0.0;
    return patch_area / std::max(d, kMinPatchDistance);
  };

  for (int e = 0; e < kNumElectrodes; ++e) {
    const Vec3 origin = plate_center + plate_rot * Vec3(grid[e].x(), grid[e].y(), 0.0);
    double sum = 0.0;
    for (int ix = 0; ix < res; ++ix) {
      const double xo = (ix + 0.5) * h - half;
      // Pair lateral offsets from both ends so mirrored configurations add
      // the same values in the same order, keeping the left/right symmetry
      // of the model exact in floating point.
      for (int iy = 0; iy < res / 2; ++iy) {
        const double lo = (iy + 0.5) * h - half;
        const double hi = (res - 1 - iy + 0.5) * h - half;
        sum += patch_term(origin, xo, lo) + patch_term(origin, xo, hi);
      }
      if (res % 2 == 1) sum += patch_term(origin, xo, (res / 2 + 0.5) * h - half);
    }
    out.frame.c[e] = params.baseline + params.gain * sum;
  }

  if (params.crosstalk > 0.0) {
    auto& c = out.frame.c;
    const double mean = (((c[0] + c[2]) + c[1]) + ((c[3] + c[5]) + c[4])) / 6.0;
    for (auto& v : c) v = (1.0 - params.crosstalk) * v + params.crosstalk * mean;
  }

  if (params.noise_sd > 0.0 && noise_rng != nullptr) {
    std::normal_distribution<double> noise(0.0, params.noise_sd);
    for (auto& v : out.frame.c) v = std::max(0.0, v + noise(*noise_rng));
  }
  return out;
}

CapFrame simulate_capacitance(const SensorArraySpec& spec, const CapModelParams& params,
                              const LimbModel& limb, const EEPose& ee, double t,
                              std::mt19937_64& rng) {
  CapSample s = capacitance_with_clearance(spec, params, limb, ee, t, &rng);
  if (s.min_clearance_cm <= 0.0)
    throw ContactError("simulate_capacitance: sensor patch touching the limb");
  return s.frame;
}

double min_patch_clearance(const SensorArraySpec& spec, int patch_resolution,
                           const LimbModel& limb, const EEPose& ee, double t) {
  const auto segments = limb.segments_at(t);
  const Mat3 plate_rot = ee.rotation() * rpy_rotation(spec.mount_rpy);
  const Vec3 plate_center = ee.position + ee.rotation() * spec.mount_translation;
  const Vec3 ux = plate_rot.col(0);
  const Vec3 uy = plate_rot.col(1);

  const int res = patch_resolution;
  const double h = spec.electrode_size_cm / res;
  const double half = spec.electrode_size_cm / 2.0;
  const auto grid = electrode_grid(spec);

  double min_d = std::numeric_limits<double>::infinity();
  for (int e = 0; e < kNumElectrodes; ++e) {
    const Vec3 origin = plate_center + plate_rot * Vec3(grid[e].x(), grid[e].y(), 0.0);
    for (int ix = 0; ix < res; ++ix) {
      const double xo = (ix + 0.5) * h - half;
      for (int iy = 0; iy < res; ++iy) {
        const double yo = (iy + 0.5) * h - half;
        min_d = std::min(min_d, signed_clearance(segments, origin + xo * ux + yo * uy));
      }
    }
  }
  return min_d;
}

std::vector<CapFrame> smooth_for_plotting(const std::vector<CapFrame>& series) {
  if (series.empty()) throw std::invalid_argument("smooth_for_plotting: empty series");
  std::vector<CapFrame> out = series;

  for (int e = 0; e < kNumElectrodes; ++e) {
    double y = series.front().c[e];
    out.front().c[e] = y;
    for (std::size_t i = 1; i < series.size(); ++i) {
      y = 0.98 * y + 0.02 * series[i].c[e];
      out[i].c[e] = y;
    }
    double lo = out.front().c[e];
    double hi = lo;
    for (const auto& f : out) {
      lo = std::min(lo, f.c[e]);
      hi = std::max(hi, f.c[e]);
    }
    if (hi - lo > 1e-12) {
      for (auto& f : out) f.c[e] = (f.c[e] - lo) / (hi - lo);
    }
    // else: constant channel, left unchanged
  }
  return out;
}

double calibration_reading(const SensorArraySpec& spec, const CapModelParams& params) {
  LimbModel cylinder({LimbSegment(Vec3(-100.0, 0.0, 0.0), Vec3::UnitX(), 200.0, 3.0, 3.0)});
  EEPose ee = pose_at_offset(cylinder, 0, 100.0, RelativePose{0.0, 5.0, 0.0, 0.0});
  CapModelParams quiet = params;
  quiet.noise_sd = 0.0;
  const CapSample s = capacitance_with_clearance(spec, quiet, cylinder, ee, 0.0, nullptr);
  return s.frame.c[1];  // top-center electrode
}

CapModelParams with_calibrated_noise(const SensorArraySpec& spec, CapModelParams params) {
  params.noise_sd = 0.005 * calibration_reading(spec, params);
  return params;
}

}  // namespace capserv
