#pragma once

#include <vector>

#include "capserv/types.hpp"

namespace capserv {

inline constexpr int kWindowLength = 50;
inline constexpr int kInputDim = kWindowLength * kNumElectrodes;  // 300
inline constexpr int kOutputDim = 4;

/// One training pair: a flattened window of the h most recent capacitance
/// frames (time-major, oldest first, electrode order within each frame) and
/// the relative pose at the window's final frame.
struct WindowSample {
  Eigen::VectorXd x;  // h * 6
  Vec4 y;             // (dy cm, dz cm, ty rad, tz rad)
};

struct WindowedData {
  std::vector<WindowSample> samples;
  std::vector<int> traj;  // source trajectory index per sample
};

/// Windows a single aligned series; throws if shorter than h.
std::vector<WindowSample> window_dataset(const std::vector<CapFrame>& frames,
                                         const std::vector<RelativePose>& poses,
                                         int h = kWindowLength);

/// Windows every trajectory independently; windows never span trajectory
/// boundaries, and trajectories shorter than h contribute nothing.
WindowedData window_dataset(const std::vector<TrajectoryRecording>& trajectories,
                            int h = kWindowLength);

/// Error summary between predicted and true poses: the paired translational
/// mean absolute error 0.5*(|d_dy|+|d_dz|) in cm, its rotational analog in
/// degrees, and per-axis MAE (cm, cm, deg, deg) with standard deviations.
struct PoseErrorStats {
  double d_eps_cm = 0.0;
  double theta_eps_deg = 0.0;
  Vec4 mae = Vec4::Zero();
  Vec4 sd = Vec4::Zero();
  int n = 0;
};

PoseErrorStats pose_errors(const std::vector<Vec4>& pred, const std::vector<Vec4>& truth);

}  // namespace capserv
