#include "capserv/limb_profiles.hpp"

#include <cmath>
#include <stdexcept>

namespace capserv {

namespace {

constexpr double kStationSegmentLength = 60.0;  // cm, long enough to look locally infinite
constexpr double kStartStation = 4.0;           // cm from the free end of segment 1

LimbSegment horizontal_cylinder(double radius, double length) {
  return LimbSegment(Vec3(0.0, 0.0, 0.0), Vec3::UnitX(), length, radius, radius);
}

// Two collinear segments along a direction pitched up by `elevation`, so a
// vertical-plane articulation of `2 * elevation` leaves both segments equally
// far from vertical.
LimbModel straight_two_segment(double elevation, double len1, double r1_base, double r1_tip,
                               double len2, double r2_base, double r2_tip) {
  const Vec3 axis(std::cos(elevation), 0.0, std::sin(elevation));
  LimbSegment s1(Vec3::Zero(), axis, len1, r1_base, r1_tip);
  LimbSegment s2(s1.tip(), axis, len2, r2_base, r2_tip);
  return LimbModel({s1, s2});
}

}  // namespace

LimbSizeProfile LimbSizeProfile::midpoints() {
  LimbSizeProfile p{};
  for (std::size_t i = 0; i < kStationRanges.size(); ++i)
    p.circumference_cm[i] = 0.5 * (kStationRanges[i].circ_min_cm + kStationRanges[i].circ_max_cm);
  return p;
}

LimbSizeProfile LimbSizeProfile::sampled(std::mt19937_64& rng) {
  LimbSizeProfile p{};
  for (std::size_t i = 0; i < kStationRanges.size(); ++i) {
    std::uniform_real_distribution<double> dist(kStationRanges[i].circ_min_cm,
                                                kStationRanges[i].circ_max_cm);
    p.circumference_cm[i] = dist(rng);
  }
  return p;
}

std::vector<LimbStation> default_stations(const LimbSizeProfile& profile) {
  std::vector<LimbStation> stations;
  for (std::size_t i = 0; i < kStationRanges.size(); ++i) {
    LimbStation s;
    s.name = kStationRanges[i].name;
    s.limb = LimbModel({horizontal_cylinder(profile.radius_cm(static_cast<int>(i)),
                                            kStationSegmentLength)});
    s.segment_index = 0;
    s.station_cm = kStationSegmentLength / 2.0;
    stations.push_back(std::move(s));
  }
  return stations;
}

LimbStation cylinder_station(const std::string& name, double radius_cm) {
  LimbStation s;
  s.name = name;
  s.limb = LimbModel({horizontal_cylinder(radius_cm, kStationSegmentLength)});
  s.segment_index = 0;
  s.station_cm = kStationSegmentLength / 2.0;
  return s;
}

const char* to_string(TaskKind k) {
  switch (k) {
    case TaskKind::bent_elbow: return "bent_elbow";
    case TaskKind::forearm_tilt: return "forearm_tilt";
    case TaskKind::bent_knee: return "bent_knee";
    case TaskKind::moving_limb: return "moving_limb";
  }
  return "unknown";
}

TaskKind task_from_string(const std::string& s) {
  if (s == "bent_elbow") return TaskKind::bent_elbow;
  if (s == "forearm_tilt") return TaskKind::forearm_tilt;
  if (s == "bent_knee") return TaskKind::bent_knee;
  if (s == "moving_limb") return TaskKind::moving_limb;
  throw std::invalid_argument("unknown task: " + s);
}

Scenario make_task_scenario(TaskKind task, double joint_angle_deg,
                            const LimbSizeProfile& profile, const RelativePose& start_jitter) {
  const double angle = deg_to_rad(joint_angle_deg);
  const double r_wrist = profile.radius_cm(0);
  const double r_forearm = profile.radius_cm(1);
  const double r_upper = profile.radius_cm(2);
  const double r_ankle = profile.radius_cm(3);
  const double r_shin = profile.radius_cm(4);
  const double r_knee = profile.radius_cm(5);

  Scenario sc;
  switch (task) {
    case TaskKind::bent_elbow: {
      // Hand-to-shoulder traversal with the elbow swung sideways.
      LimbModel straight = straight_two_segment(0.0, 26.0, r_wrist, r_forearm,
                                                28.0, r_forearm, r_upper);
      sc.limb = angle > 0.0 ? articulate(straight, angle, JointPlane::horizontal) : straight;
      sc.joint_arc_cm = 26.0;
      break;
    }
    case TaskKind::forearm_tilt: {
      // Vertical-plane bend split evenly across the joint so neither segment
      // goes vertical: the forearm climbs at angle/2, the upper arm descends
      // at angle/2.
      LimbModel straight = straight_two_segment(angle / 2.0, 26.0, r_wrist, r_forearm,
                                                28.0, r_forearm, r_upper);
      sc.limb = angle > 0.0 ? articulate(straight, angle, JointPlane::vertical) : straight;
      sc.joint_arc_cm = 26.0;
      break;
    }
    case TaskKind::bent_knee: {
      // Thigh-to-ankle traversal over the knee, same symmetric split.
      LimbModel straight = straight_two_segment(angle / 2.0, 32.0, r_knee, r_knee,
                                                34.0, r_shin, r_ankle);
      sc.limb = angle > 0.0 ? articulate(straight, angle, JointPlane::vertical) : straight;
      sc.joint_arc_cm = 32.0;
      break;
    }
    case TaskKind::moving_limb: {
      LimbMotion motion;
      motion.translation_axis = Vec3::UnitY();
      motion.amplitude_cm = 10.0;
      motion.period_s = 8.0;
      LimbModel limb({horizontal_cylinder(r_forearm, 70.0)}, 0.0, motion);
      sc.limb = std::move(limb);
      sc.joint_arc_cm = -1.0;
      break;
    }
  }

  RelativePose start{0.0, 5.0, 0.0, 0.0};
  start.dy += start_jitter.dy;
  start.dz += start_jitter.dz;
  start.ty += start_jitter.ty;
  start.tz += start_jitter.tz;
  sc.start = pose_at_offset(sc.limb, 0, kStartStation, start, 0.0);
  return sc;
}

double task_run_length_cm(TaskKind task, const LimbSizeProfile&) {
  switch (task) {
    case TaskKind::bent_elbow:
    case TaskKind::forearm_tilt:
      return (26.0 - kStartStation) + 0.75 * 28.0;  // past the elbow, well onto the upper arm
    case TaskKind::bent_knee:
      return (32.0 - kStartStation) + 0.75 * 34.0;
    case TaskKind::moving_limb:
      return 48.0;  // three motion periods at the default forward speed
  }
  return 45.0;
}

}  // namespace capserv
