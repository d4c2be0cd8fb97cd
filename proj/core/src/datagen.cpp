#include "capserv/datagen.hpp"

#include <cmath>

namespace capserv {

namespace {

constexpr int kMaxTrajectorySteps = 5000;

bool converged(const RelativePose& p, const RelativePose& target, const CollectionSpec& spec) {
  return std::abs(p.dy - target.dy) < spec.pos_tolerance_cm &&
         std::abs(p.dz - target.dz) < spec.pos_tolerance_cm &&
         std::abs(p.ty - target.ty) < spec.ang_tolerance_rad &&
         std::abs(p.tz - target.tz) < spec.ang_tolerance_rad;
}

}  // namespace

RelativePose sample_target(const PoseBounds& bounds, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dy(bounds.dy_min_cm, bounds.dy_max_cm);
  std::uniform_real_distribution<double> dz(bounds.dz_min_cm, bounds.dz_max_cm);
  std::uniform_real_distribution<double> ty(bounds.ty_min_rad, bounds.ty_max_rad);
  std::uniform_real_distribution<double> tz(bounds.tz_min_rad, bounds.tz_max_rad);
  RelativePose p;
  p.dy = dy(rng);
  p.dz = dz(rng);
  p.ty = ty(rng);
  p.tz = tz(rng);
  return p;
}

Dataset collect_trajectories(const CollectionSpec& spec, const LimbStation& station,
                             const SensorArraySpec& sensor, const CapModelParams& params,
                             std::mt19937_64& rng) {
  const LimbModel& limb = station.limb;
  const KStarFrame frame = k_star_frame(
      limb, limb.segments()[station.segment_index].base +
                station.station_cm * limb.segments()[station.segment_index].axis);

  const EEPose rest = pose_at_offset(limb, station.segment_index, station.station_cm,
                                     RelativePose{0.0, 0.0, 0.0, 0.0});
  const double dt = 1.0 / spec.capture_rate_hz;

  std::uniform_real_distribution<double> v_lin(spec.speeds.v_lin_min_cm_s,
                                               spec.speeds.v_lin_max_cm_s);
  std::uniform_real_distribution<double> v_ang(spec.speeds.v_ang_min_rad_s,
                                               spec.speeds.v_ang_max_rad_s);

  Dataset out;
  EEPose ee = rest;
  for (int i = 0; i < spec.trajectories_per_station; ++i) {
    const RelativePose target = sample_target(spec.pose_space, rng);
    const double step_lin = v_lin(rng) * dt;
    const double step_ang = v_ang(rng) * dt;

    TrajectoryRecording rec;
    bool aborted = false;
    for (int t = 0; t < kMaxTrajectorySteps; ++t) {
      const RelativePose p = relative_pose(limb, ee);
      if (converged(p, target, spec)) break;

      CapFrame cap;
      try {
        cap = simulate_capacitance(sensor, params, limb, ee, t * dt, rng);
      } catch (const ContactError&) {
        aborted = true;
        break;
      }
      cap.t = t;
      rec.steps.push_back({t, cap, p, ee});

      // Advance toward the target at constant commanded speed, clamping
      // translation and rotation independently as each converges.
      const Eigen::Vector2d rem_pos(target.dy - p.dy, target.dz - p.dz);
      const double pos_norm = rem_pos.norm();
      if (pos_norm > 0.0) {
        const double d = std::min(step_lin, pos_norm);
        ee.position += (d / pos_norm) * (rem_pos.x() * frame.axis_y + rem_pos.y() * frame.axis_z);
      }
      const Eigen::Vector2d rem_ang(target.ty - p.ty, target.tz - p.tz);
      const double ang_norm = rem_ang.norm();
      if (ang_norm > 0.0) {
        const double d = std::min(step_ang, ang_norm);
        ee.rpy.y() += (d / ang_norm) * rem_ang.x();
        ee.rpy.z() += (d / ang_norm) * rem_ang.y();
        ee.wrap_rpy();
      }
    }

    if (aborted) {
      ++out.provenance.aborted_trajectories;
      ee = rest;  // restart from the rest pose with clean labels
    } else {
      out.trajectories.push_back(std::move(rec));
    }
  }
  out.provenance.description = "collect:" + station.name;
  return out;
}

Dataset linear_sweep(const LimbStation& station, const SensorArraySpec& sensor,
                     const CapModelParams& params, int n_runs, std::mt19937_64& rng,
                     double capture_rate_hz) {
  const LimbModel& limb = station.limb;
  const EEPose start = pose_at_offset(limb, station.segment_index, station.station_cm,
                                      RelativePose{0.0, 3.0, 0.0, 0.0});
  const KStarFrame frame = k_star_frame(limb, start.position);
  const double dt = 1.0 / capture_rate_hz;

  std::uniform_real_distribution<double> angle(0.0, M_PI);
  std::uniform_real_distribution<double> speed(3.0, 10.0);

  Dataset out;
  for (int run = 0; run < n_runs; ++run) {
    const double a = angle(rng);
    const Eigen::Vector2d dir(std::cos(a), std::sin(a));  // upper half-plane
    const double step = speed(rng) * dt;

    EEPose ee = start;
    TrajectoryRecording rec;
    for (int t = 0;; ++t) {
      const RelativePose p = relative_pose(limb, ee);
      CapFrame cap = simulate_capacitance(sensor, params, limb, ee, t * dt, rng);
      cap.t = t;
      rec.steps.push_back({t, cap, p, ee});
      if (std::hypot(p.dy, p.dz) >= 20.0) break;
      ee.position += step * (dir.x() * frame.axis_y + dir.y() * frame.axis_z);
    }
    out.trajectories.push_back(std::move(rec));
  }
  out.provenance.description = "linear_sweep:" + station.name;
  return out;
}

Dataset rotation_sweep(const LimbStation& station, const SensorArraySpec& sensor,
                       const CapModelParams& params, int n_runs, std::mt19937_64& rng,
                       double capture_rate_hz) {
  const LimbModel& limb = station.limb;
  const EEPose start = pose_at_offset(limb, station.segment_index, station.station_cm,
                                      RelativePose{0.0, 5.0, 0.0, 0.0});
  const double dt = 1.0 / capture_rate_hz;

  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> speed(M_PI / 20.0, M_PI / 8.0);

  Dataset out;
  for (int run = 0; run < n_runs; ++run) {
    const double a = angle(rng);
    const Eigen::Vector2d dir(std::cos(a), std::sin(a));
    const double step = speed(rng) * dt;

    EEPose ee = start;
    TrajectoryRecording rec;
    for (int t = 0;; ++t) {
      const RelativePose p = relative_pose(limb, ee);
      CapFrame cap = simulate_capacitance(sensor, params, limb, ee, t * dt, rng);
      cap.t = t;
      rec.steps.push_back({t, cap, p, ee});
      if (std::hypot(p.ty, p.tz) >= M_PI / 4.0) break;
      ee.rpy.y() += step * dir.x();
      ee.rpy.z() += step * dir.y();
      ee.wrap_rpy();
    }
    out.trajectories.push_back(std::move(rec));
  }
  out.provenance.description = "rotation_sweep:" + station.name;
  return out;
}

}  // namespace capserv
