#include "capserv/window.hpp"

#include <cmath>

namespace capserv {

std::vector<WindowSample> window_dataset(const std::vector<CapFrame>& frames,
                                         const std::vector<RelativePose>& poses, int h) {
  if (frames.size() != poses.size())
    throw std::invalid_argument("window_dataset: frame/pose series length mismatch");
  if (h < 1) throw std::invalid_argument("window_dataset: h must be >= 1");
  const int n = static_cast<int>(frames.size());
  if (n < h) throw std::invalid_argument("window_dataset: series shorter than window");

  std::vector<WindowSample> out;
  out.reserve(n - h + 1);
  for (int end = h - 1; end < n; ++end) {
    WindowSample s;
    s.x.resize(h * kNumElectrodes);
    for (int k = 0; k < h; ++k) {
      const auto& c = frames[end - h + 1 + k].c;
      for (int e = 0; e < kNumElectrodes; ++e) s.x[k * kNumElectrodes + e] = c[e];
    }
    s.y = poses[end].vec();
    out.push_back(std::move(s));
  }
  return out;
}

WindowedData window_dataset(const std::vector<TrajectoryRecording>& trajectories, int h) {
  WindowedData out;
  for (int ti = 0; ti < static_cast<int>(trajectories.size()); ++ti) {
    const auto& steps = trajectories[ti].steps;
    if (static_cast<int>(steps.size()) < h) continue;
    std::vector<CapFrame> frames;
    std::vector<RelativePose> poses;
    frames.reserve(steps.size());
    poses.reserve(steps.size());
    for (const auto& s : steps) {
      frames.push_back(s.frame);
      poses.push_back(s.pose);
    }
    auto samples = window_dataset(frames, poses, h);
    for (auto& s : samples) {
      out.samples.push_back(std::move(s));
      out.traj.push_back(ti);
    }
  }
  return out;
}

PoseErrorStats pose_errors(const std::vector<Vec4>& pred, const std::vector<Vec4>& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("pose_errors: length mismatch");
  if (pred.empty()) throw std::invalid_argument("pose_errors: empty input");

  PoseErrorStats stats;
  stats.n = static_cast<int>(pred.size());
  Vec4 sum = Vec4::Zero();
  Vec4 sum_sq = Vec4::Zero();
  double d_eps = 0.0;
  double t_eps = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    Vec4 abs_err = (pred[i] - truth[i]).cwiseAbs();
    abs_err[2] = rad_to_deg(abs_err[2]);
    abs_err[3] = rad_to_deg(abs_err[3]);
    sum += abs_err;
    sum_sq += abs_err.cwiseProduct(abs_err);
    d_eps += 0.5 * (abs_err[0] + abs_err[1]);
    t_eps += 0.5 * (abs_err[2] + abs_err[3]);
  }
  stats.mae = sum / stats.n;
  stats.d_eps_cm = d_eps / stats.n;
  stats.theta_eps_deg = t_eps / stats.n;
  for (int k = 0; k < 4; ++k) {
    const double var = std::max(0.0, sum_sq[k] / stats.n - stats.mae[k] * stats.mae[k]);
    stats.sd[k] = std::sqrt(var);
  }
  return stats;
}

}  // namespace capserv
