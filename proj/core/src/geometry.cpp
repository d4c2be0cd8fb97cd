#include "capserv/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace capserv {

namespace {

constexpr double kUnitNormTol = 1e-9;
constexpr double kJointGapTol = 1e-6;
constexpr double kDegenerateAxisTol = 1.0 - 1e-9;

// Distance from a point to the finite axis segment, and the clamped station.
struct AxisProjection {
  double station;
  double distance;
};

AxisProjection project_to_axis(const LimbSegment& seg, const Vec3& p) {
  const double s = (p - seg.base).dot(seg.axis);
  const double clamped = std::clamp(s, 0.0, seg.length);
  const Vec3 closest = seg.base + clamped * seg.axis;
  return {clamped, (p - closest).norm()};
}

// 2D point-to-segment distance, used for the frustum cross-section outline.
double segment_distance_2d(double px, double py, double ax, double ay, double bx,
                           double by) {
  const double abx = bx - ax;
  const double aby = by - ay;
  const double len2 = abx * abx + aby * aby;
  double u = 0.0;
  if (len2 > 0.0) u = std::clamp(((px - ax) * abx + (py - ay) * aby) / len2, 0.0, 1.0);
  const double dx = px - (ax + u * abx);
  const double dy = py - (ay + u * aby);
  return std::sqrt(dx * dx + dy * dy);
}

// Signed distance to one capped frustum. The solid is rotationally symmetric,
// so reduce to 2D (station s, radial distance rho) and measure against the
// outline: base cap, slanted side, tip cap.
double frustum_signed_distance(const LimbSegment& seg, const Vec3& p) {
  const Vec3 d = p - seg.base;
  const double s = d.dot(seg.axis);
  const double rho = (d - s * seg.axis).norm();

  const double d_base = segment_distance_2d(s, rho, 0.0, 0.0, 0.0, seg.radius_base);
  const double d_side = segment_distance_2d(s, rho, 0.0, seg.radius_base, seg.length,
                                            seg.radius_tip);
  const double d_tip = segment_distance_2d(s, rho, seg.length, 0.0, seg.length,
                                           seg.radius_tip);
  const double dist = std::min({d_base, d_side, d_tip});

  const bool inside = s >= 0.0 && s <= seg.length && rho <= seg.radius_at(std::clamp(s, 0.0, seg.length));
  return inside ? -dist : dist;
}

int nearest_segment_index(const std::vector<LimbSegment>& segs, const Vec3& p) {
  int best = 0;
  double best_d = project_to_axis(segs[0], p).distance;
  for (int i = 1; i < static_cast<int>(segs.size()); ++i) {
    const double d = project_to_axis(segs[i], p).distance;
    if (d <= best_d) {  // ties go to the distal segment
      best = i;
      best_d = d;
    }
  }
  return best;
}

KStarFrame frame_for_segment(const LimbSegment& seg, int index, const Vec3& sensor_center) {
  const Vec3 n = seg.axis;
  if (std::abs(n.dot(Vec3::UnitZ())) > kDegenerateAxisTol) {
    throw DegenerateAxisError(
        "limb axis is vertical: cross section has no unique top point");
  }

  KStarFrame f;
  f.segment_index = index;
  f.station = std::clamp((sensor_center - seg.base).dot(n), 0.0, seg.length);
  f.k0 = seg.base + f.station * n;
  f.axis_x = n;
  f.axis_z = (Vec3::UnitZ() - Vec3::UnitZ().dot(n) * n).normalized();
  f.axis_y = f.axis_z.cross(f.axis_x);
  f.k_star = f.k0 + seg.radius_at(f.station) * f.axis_z;
  f.surface_pitch = std::atan(-seg.radius_slope());
  return f;
}

}  // namespace

LimbSegment::LimbSegment(const Vec3& base_point, const Vec3& axis_dir, double len,
                         double r_base, double r_tip)
    : base(base_point), axis(axis_dir), length(len), radius_base(r_base), radius_tip(r_tip) {
  if (std::abs(axis.norm() - 1.0) >= kUnitNormTol)
    throw std::invalid_argument("LimbSegment: axis_dir must have unit norm");
  if (!(length > 0.0) || !(radius_base > 0.0) || !(radius_tip > 0.0))
    throw std::invalid_argument("LimbSegment: length and radii must be positive");
}

LimbModel::LimbModel(std::vector<LimbSegment> segments, double joint_angle,
                     std::optional<LimbMotion> motion)
    : segments_(std::move(segments)), joint_angle_(joint_angle), motion_(std::move(motion)) {
  if (segments_.empty() || segments_.size() > 2)
    throw std::invalid_argument("LimbModel: expects 1 or 2 segments");
  if (segments_.size() == 2 &&
      (segments_[0].tip() - segments_[1].base).norm() >= kJointGapTol)
    throw std::invalid_argument("LimbModel: segments must share the joint point");
  if (joint_angle_ < 0.0 || joint_angle_ > kMaxJointAngle + 1e-12)
    throw std::invalid_argument("LimbModel: joint_angle out of range");
}

std::vector<LimbSegment> LimbModel::segments_at(double t) const {
  if (!motion_) return segments_;
  const Vec3 shift = motion_->translation_at(t);
  const double angle = motion_->rotation_angle_at(t);
  Mat3 rot = Mat3::Identity();
  if (motion_->rotation_amplitude_rad != 0.0)
    rot = Eigen::AngleAxisd(angle, motion_->rotation_axis).toRotationMatrix();

  std::vector<LimbSegment> out = segments_;
  for (auto& seg : out) {
    seg.base = rot * (seg.base - motion_->pivot) + motion_->pivot + shift;
    seg.axis = rot * seg.axis;
  }
  return out;
}

double LimbModel::arc_length() const {
  double total = 0.0;
  for (const auto& seg : segments_) total += seg.length;
  return total;
}

KStarFrame k_star_frame(const LimbModel& limb, const Vec3& sensor_center, double t) {
  const auto segs = limb.segments_at(t);
  const int idx = nearest_segment_index(segs, sensor_center);
  return frame_for_segment(segs[idx], idx, sensor_center);
}

Vec3 surface_point_k_star(const LimbModel& limb, const Vec3& sensor_center, double t) {
  return k_star_frame(limb, sensor_center, t).k_star;
}

RelativePose relative_pose(const LimbModel& limb, const EEPose& ee, double t) {
  const KStarFrame f = k_star_frame(limb, ee.position, t);

  const Vec3 offset = ee.position - f.k_star;
  RelativePose p;
  p.dy = offset.dot(f.axis_y);
  p.dz = offset.dot(f.axis_z);

  const Vec3 xe = ee.x_axis();
  // Pitch of the sensor's travel axis within the k* frame (yaw-then-pitch
  // decomposition), measured against the local surface tangent.
  const double a = xe.dot(f.axis_x);
  const double b = xe.dot(f.axis_y);
  const double c = xe.dot(f.axis_z);
  const double sensor_pitch = std::atan2(-c, std::hypot(a, b));
  p.ty = wrap_angle(sensor_pitch - f.surface_pitch);

  // Yaw between the horizontal projections of the limb axis and the sensor
  // travel axis.
  const Vec3 hk(f.axis_x.x(), f.axis_x.y(), 0.0);
  const Vec3 he(xe.x(), xe.y(), 0.0);
  p.tz = wrap_angle(std::atan2(hk.x() * he.y() - hk.y() * he.x(), hk.dot(he)));
  return p;
}

double signed_clearance(const LimbModel& limb, const Vec3& point, double t) {
  return signed_clearance(limb.segments_at(t), point);
}

double signed_clearance(const std::vector<LimbSegment>& posed_segments, const Vec3& point) {
  double d = frustum_signed_distance(posed_segments[0], point);
  for (std::size_t i = 1; i < posed_segments.size(); ++i)
    d = std::min(d, frustum_signed_distance(posed_segments[i], point));
  return d;
}

LimbModel articulate(const LimbModel& straight, double joint_angle, JointPlane plane) {
  if (joint_angle < 0.0 || joint_angle > kMaxJointAngle + 1e-12)
    throw std::invalid_argument("articulate: joint_angle out of range");
  if (straight.segments().size() != 2)
    throw std::invalid_argument("articulate: limb must have two segments");

  const LimbSegment& s1 = straight.segments()[0];
  LimbSegment s2 = straight.segments()[1];

  Vec3 rot_axis;
  if (plane == JointPlane::horizontal) {
    rot_axis = Vec3::UnitZ();
  } else {
    rot_axis = Vec3::UnitZ().cross(s1.axis);
    const double n = rot_axis.norm();
    if (n < 1e-9)
      throw std::invalid_argument("articulate: vertical-plane joint needs a non-vertical first segment");
    rot_axis /= n;
  }

  const Mat3 rot = Eigen::AngleAxisd(joint_angle, rot_axis).toRotationMatrix();
  const Vec3 joint = s1.tip();
  s2.axis = (rot * s2.axis).normalized();
  s2.base = joint;  // rotation about the joint keeps the joint fixed

  return LimbModel({s1, s2}, joint_angle, straight.motion());
}

EEPose pose_at_offset(const LimbModel& limb, int segment_index, double station,
                      const RelativePose& offset, double t) {
  const auto segs = limb.segments_at(t);
  const LimbSegment& seg = segs.at(static_cast<std::size_t>(segment_index));
  const KStarFrame f = frame_for_segment(seg, segment_index, seg.base + station * seg.axis);

  EEPose ee;
  ee.position = f.k_star + offset.dy * f.axis_y + offset.dz * f.axis_z;

  const double yaw_axis = std::atan2(f.axis_x.y(), f.axis_x.x());
  const double yaw = wrap_angle(yaw_axis + offset.tz);

  // Solve for the world pitch that yields the requested surface-relative
  // pitch: -x_e.axis_z = A cos(p) + B sin(p) with x_e = Rz(yaw)Ry(p) e_x.
  const double target = std::sin(offset.ty + f.surface_pitch);
  const double A = -f.axis_z.dot(Vec3(std::cos(yaw), std::sin(yaw), 0.0));
  const double B = f.axis_z.z();
  const double mag = std::hypot(A, B);
  const double pitch = std::asin(std::clamp(target / mag, -1.0, 1.0)) - std::atan2(A, B);

  ee.rpy = Vec3(0.0, wrap_angle(pitch), yaw);
  return ee;
}

double arc_coordinate(const LimbModel& limb, const Vec3& point, double t) {
  const auto segs = limb.segments_at(t);
  const int idx = nearest_segment_index(segs, point);
  double before = 0.0;
  for (int i = 0; i < idx; ++i) before += segs[i].length;
  return before + project_to_axis(segs[idx], point).station;
}

}  // namespace capserv
