#pragma once

#include <random>

#include "capserv/geometry.hpp"

// Hand-rolled random generators for property-style tests. Kept away from
// vertical axes so every configuration has a well-defined surface frame.
namespace capserv::testgen {

inline LimbModel random_straight_limb(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> yaw(-M_PI, M_PI);
  std::uniform_real_distribution<double> elev(-0.9, 0.9);  // rad, well off vertical
  std::uniform_real_distribution<double> radius(1.5, 6.5);
  std::uniform_real_distribution<double> length(20.0, 60.0);

  const double y = yaw(rng);
  const double e = elev(rng);
  const Vec3 axis(std::cos(e) * std::cos(y), std::cos(e) * std::sin(y), std::sin(e));
  return LimbModel({LimbSegment(Vec3(pos(rng), pos(rng), pos(rng)), axis, length(rng),
                                radius(rng), radius(rng) * 0.9)});
}

inline LimbModel random_bent_limb(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> yaw(-M_PI, M_PI);
  std::uniform_real_distribution<double> elev(-0.3, 0.7);
  std::uniform_real_distribution<double> radius(1.5, 6.0);
  std::uniform_real_distribution<double> length(18.0, 32.0);  // limb-scale segments
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double y = yaw(rng);
  const double e = elev(rng);
  const Vec3 axis(std::cos(e) * std::cos(y), std::cos(e) * std::sin(y), std::sin(e));
  const Vec3 base(pos(rng), pos(rng), pos(rng));
  const double r1 = radius(rng);
  const double r2 = radius(rng);
  LimbSegment s1(base, axis, length(rng), r1, 0.5 * (r1 + r2));
  LimbSegment s2(s1.tip(), axis, length(rng), 0.5 * (r1 + r2), r2);
  LimbModel straight({s1, s2});

  const bool horizontal = unit(rng) < 0.5;
  double max_angle = kMaxJointAngle;
  if (!horizontal) max_angle = std::min(max_angle, e + 1.2);  // keep segment 2 off vertical
  std::uniform_real_distribution<double> angle(0.0, std::max(0.1, max_angle));
  return articulate(straight, angle(rng),
                    horizontal ? JointPlane::horizontal : JointPlane::vertical);
}

/// A query point near (but not on) the limb: offset from a random station in
/// the local frame.
inline Vec3 random_sensor_point(const LimbModel& limb, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> lateral(-8.0, 8.0);
  std::uniform_real_distribution<double> vertical(1.0, 12.0);

  const auto& segs = limb.segments();
  const auto& seg = segs[static_cast<std::size_t>(unit(rng) * segs.size()) % segs.size()];
  const double s = (0.1 + 0.8 * unit(rng)) * seg.length;
  const Vec3 k0 = seg.base + s * seg.axis;
  const Vec3 up = (Vec3::UnitZ() - Vec3::UnitZ().dot(seg.axis) * seg.axis).normalized();
  const Vec3 left = up.cross(seg.axis);
  return k0 + lateral(rng) * left + (seg.radius_at(s) + vertical(rng)) * up;
}

}  // namespace capserv::testgen
