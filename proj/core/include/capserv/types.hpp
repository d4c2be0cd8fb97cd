#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace capserv {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

inline constexpr int kNumElectrodes = 6;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

inline double deg_to_rad(double d) { return d * M_PI / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / M_PI; }

/// 4D pose offset between the sensor array and the limb surface frame:
/// lateral and vertical displacement (cm) plus pitch and yaw (rad).
/// dy is positive toward the limb's left when looking along the limb axis,
/// dz is positive upward. Angles live in (-pi, pi].
struct RelativePose {
  double dy = 0.0;  // cm
  double dz = 0.0;  // cm
  double ty = 0.0;  // rad, pitch relative to the local surface tangent
  double tz = 0.0;  // rad, yaw relative to the limb axis (horizontal projection)

  Vec4 vec() const { return Vec4(dy, dz, ty, tz); }

  static RelativePose from_vec(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
};

/// Free-floating end-effector pose. Orientation is fixed-axis roll-pitch-yaw:
/// rotate about world X by rpy.x(), then world Y by rpy.y(), then world Z by
/// rpy.z(), i.e. R = Rz * Ry * Rx. All modules share this convention.
struct EEPose {
  Vec3 position = Vec3::Zero();  // cm
  Vec3 rpy = Vec3::Zero();       // rad, each in (-pi, pi]

  Mat3 rotation() const {
    return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
            Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
            Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
        .toRotationMatrix();
  }

  Vec3 x_axis() const { return rotation().col(0); }
  Vec3 z_axis() const { return rotation().col(2); }

  void wrap_rpy() {
    rpy.x() = wrap_angle(rpy.x());
    rpy.y() = wrap_angle(rpy.y());
    rpy.z() = wrap_angle(rpy.z());
  }
};

/// One timestamped reading of all six electrodes. Electrode order is fixed:
/// (top-left, top-center, top-right, bottom-left, bottom-center, bottom-right)
/// in the end-effector frame, where "top" is +X (direction of travel) and
/// "left" is +Y.
struct CapFrame {
  int t = 0;
  std::array<double, kNumElectrodes> c{};
};

/// One recorded simulation step: the capacitance frame, the ground-truth
/// relative pose, and the end-effector pose it was measured from.
struct StepRecord {
  int t = 0;
  CapFrame frame;
  RelativePose pose;
  EEPose ee;
};

struct TrajectoryRecording {
  std::vector<StepRecord> steps;
};

/// Raised when the limb axis is vertical enough that the cross-section has no
/// unique topmost point.
class DegenerateAxisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a sensor patch touches or penetrates the limb surface.
class ContactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace capserv
