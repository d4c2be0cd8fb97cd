#pragma once

#include <optional>
#include <vector>

#include "capserv/types.hpp"

namespace capserv {

/// One rigid limb segment modeled as a conical frustum: circular cross
/// sections perpendicular to the axis, radius interpolating linearly from
/// base to tip. A cylinder is the special case radius_base == radius_tip.
/// End caps are flat disks for clearance queries.
struct LimbSegment {
  Vec3 base = Vec3::Zero();       // cm
  Vec3 axis = Vec3::UnitX();      // unit vector, base -> tip
  double length = 1.0;            // cm, > 0
  double radius_base = 1.0;       // cm, > 0
  double radius_tip = 1.0;        // cm, > 0

  LimbSegment() = default;
  LimbSegment(const Vec3& base_point, const Vec3& axis_dir, double len,
              double r_base, double r_tip);

  Vec3 tip() const { return base + length * axis; }
  double radius_at(double station) const {
    return radius_base + (radius_tip - radius_base) * (station / length);
  }
  /// d(radius)/d(station); the surface of a frustum slopes by atan of this.
  double radius_slope() const { return (radius_tip - radius_base) / length; }
};

/// Rigid whole-limb motion: sinusoidal translation plus an optional
/// sinusoidal rotation about a pivot. Time zero is the unmoved configuration.
struct LimbMotion {
  Vec3 translation_axis = Vec3::UnitY();  // unit
  double amplitude_cm = 0.0;
  double period_s = 8.0;
  double phase = 0.0;

  Vec3 rotation_axis = Vec3::UnitZ();  // unit
  double rotation_amplitude_rad = 0.0;
  Vec3 pivot = Vec3::Zero();

  Vec3 translation_at(double t) const {
    return translation_axis * (amplitude_cm * std::sin(2.0 * M_PI * t / period_s + phase));
  }
  double rotation_angle_at(double t) const {
    return rotation_amplitude_rad * std::sin(2.0 * M_PI * t / period_s + phase);
  }
};

inline constexpr double kMaxJointAngle = 2.0 * M_PI / 3.0;

/// A limb: one or two frustum segments joined end to end, with an optional
/// rigid motion schedule. Immutable after construction; safe to share across
/// threads.
class LimbModel {
 public:
  /// Unit cylinder along +X; placeholder for containers and configs.
  LimbModel() : segments_{LimbSegment()} {}

  explicit LimbModel(std::vector<LimbSegment> segments, double joint_angle = 0.0,
                     std::optional<LimbMotion> motion = std::nullopt);

  const std::vector<LimbSegment>& segments() const { return segments_; }
  double joint_angle() const { return joint_angle_; }
  const std::optional<LimbMotion>& motion() const { return motion_; }

  /// The limb's segments rigidly transformed to their pose at time t.
  /// Without a motion schedule this is the identity.
  std::vector<LimbSegment> segments_at(double t) const;

  /// Total axial length of the segment chain.
  double arc_length() const;

 private:
  std::vector<LimbSegment> segments_;
  double joint_angle_ = 0.0;
  std::optional<LimbMotion> motion_;
};

/// The local surface frame at the topmost point of the limb cross section
/// nearest the sensor center: origin k_star, x along the segment axis,
/// z the in-plane "up" direction, y = z cross x (limb-left).
struct KStarFrame {
  int segment_index = 0;
  double station = 0.0;  // cm along the segment axis, clamped to [0, length]
  Vec3 k0 = Vec3::Zero();
  Vec3 k_star = Vec3::Zero();
  Vec3 axis_x = Vec3::UnitX();
  Vec3 axis_y = Vec3::UnitY();
  Vec3 axis_z = Vec3::UnitZ();
  /// Pitch of the limb surface tangent along the axis (zero for cylinders,
  /// atan(-radius_slope) for frusta).
  double surface_pitch = 0.0;
};

/// Computes the k* frame for the segment nearest sensor_center at time t.
/// Throws DegenerateAxisError when the nearest axis is vertical enough that
/// the cross section has no unique top point (|n.e_z| > 1 - 1e-9).
KStarFrame k_star_frame(const LimbModel& limb, const Vec3& sensor_center, double t = 0.0);

/// The topmost surface point of the cross section through the axis point
/// closest to sensor_center (origin of the relative-pose frame).
Vec3 surface_point_k_star(const LimbModel& limb, const Vec3& sensor_center, double t = 0.0);

/// Ground-truth relative pose between an end effector (treated as the sensor
/// plate frame) and the limb at time t.
RelativePose relative_pose(const LimbModel& limb, const EEPose& ee, double t = 0.0);

/// Signed distance from a point to the limb surface (union of capped
/// frusta); negative inside the limb.
double signed_clearance(const LimbModel& limb, const Vec3& point, double t = 0.0);

/// Same, against segments already posed at some time (avoids re-posing the
/// limb for every query in inner loops).
double signed_clearance(const std::vector<LimbSegment>& posed_segments, const Vec3& point);

enum class JointPlane {
  horizontal,  // elbow-style: segment 2 swings sideways (about world Z)
  vertical,    // knee/tilt-style: segment 2 swings downward (about limb-left)
};

/// Rotates segment 2 of a straight two-segment limb about the shared joint
/// by joint_angle within the given plane. Positive angles bend toward the
/// limb's left (horizontal) or toward the ground (vertical).
LimbModel articulate(const LimbModel& straight, double joint_angle, JointPlane plane);

/// Places an end effector at a prescribed relative pose above a given station
/// of a limb segment. Exact for straight horizontal limbs; used to seed data
/// collection and servo scenarios.
EEPose pose_at_offset(const LimbModel& limb, int segment_index, double station,
                      const RelativePose& offset, double t = 0.0);

/// Arc-length coordinate of a point along the segment chain (projection onto
/// the nearest segment plus the lengths of the segments before it).
double arc_coordinate(const LimbModel& limb, const Vec3& point, double t = 0.0);

}  // namespace capserv
