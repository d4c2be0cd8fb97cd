#include "capserv/control.hpp"

#include <algorithm>
#include <cmath>

namespace capserv {

Vec4 pd_action(const Vec4& e, const Vec4& e_dot, const Gains& gains) {
  return gains.kp.cwiseProduct(e) + gains.kd.cwiseProduct(e_dot);
}

Vec4 estimate_velocity(const std::vector<Vec4>& error_history, double control_rate_hz) {
  const std::size_t n = error_history.size();
  if (n < 2) return Vec4::Zero();
  return (error_history[n - 1] - error_history[n - 2]) * control_rate_hz;
}

void ServoConfig::validate() const {
  if (capture_rate_hz <= 0 || control_rate_hz <= 0 || capture_rate_hz % control_rate_hz != 0)
    throw std::invalid_argument("ServoConfig: capture rate must be a multiple of control rate");
  if (v_x_cm_s == 0.0) throw std::invalid_argument("ServoConfig: v_x must be nonzero");
  if (window_length < 1) throw std::invalid_argument("ServoConfig: window_length must be >= 1");
  if (run_length_cm <= 0.0) throw std::invalid_argument("ServoConfig: run_length must be > 0");
  gains.validate();
}

const char* to_string(ServoOutcome o) {
  switch (o) {
    case ServoOutcome::success: return "success";
    case ServoOutcome::lost_track: return "lost_track";
    case ServoOutcome::contact_halt: return "contact_halt";
  }
  return "unknown";
}

Vec4 MlpPoseEstimator::estimate(const std::deque<CapFrame>& window, const LimbModel&,
                                const EEPose&, double) {
  Eigen::VectorXd x(static_cast<int>(window.size()) * kNumElectrodes);
  int k = 0;
  for (const auto& f : window)
    for (int e = 0; e < kNumElectrodes; ++e) x[k++] = f.c[e];
  return model_.predict(x);
}

Vec4 TruePoseEstimator::estimate(const std::deque<CapFrame>&, const LimbModel& limb,
                                 const EEPose& ee, double t) {
  return relative_pose(limb, ee, t).vec() + bias_;
}

ServoSimulation::ServoSimulation(const Scenario& scenario, PoseEstimator& estimator,
                                 const ServoConfig& cfg, const SensorArraySpec& sensor,
                                 const CapModelParams& params, std::mt19937_64 rng)
    : scenario_(scenario),
      estimator_(estimator),
      cfg_(cfg),
      sensor_(sensor),
      params_(params),
      rng_(std::move(rng)),
      ee_(scenario.start) {
  cfg_.validate();
  sensor_.validate();
  params_.validate();
  // Nominal run duration plus slack for the warm-up window; the loop always
  // terminates even if feedback wanders.
  const double nominal_s = cfg_.run_length_cm / std::abs(cfg_.v_x_cm_s);
  max_ticks_ = static_cast<int>(std::ceil(nominal_s * cfg_.capture_rate_hz)) +
               cfg_.window_length + 2 * cfg_.capture_rate_hz;
}

bool ServoSimulation::done() const {
  return halted_ || forward_travel_ >= cfg_.run_length_cm - 1e-9 || tick_ >= max_ticks_;
}

bool ServoSimulation::capture_tick() {
  if (done()) return false;
  ++tick_;
  const double t = static_cast<double>(tick_) / cfg_.capture_rate_hz;

  const CapSample sample = capacitance_with_clearance(sensor_, params_, scenario_.limb, ee_,
                                                      t, &rng_);
  CapFrame frame = sample.frame;
  frame.t = tick_;
  window_.push_back(frame);
  if (static_cast<int>(window_.size()) > cfg_.window_length) window_.pop_front();
  last_clearance_ = sample.min_clearance_cm;

  const int stride = cfg_.capture_rate_hz / cfg_.control_rate_hz;
  if (static_cast<int>(window_.size()) == cfg_.window_length && tick_ % stride == 0) {
    control_update();
    return true;
  }
  return false;
}

void ServoSimulation::control_update() {
  const double t = static_cast<double>(tick_) / cfg_.capture_rate_hz;

  const Vec4 p_hat = estimator_.estimate(window_, scenario_.limb, ee_, t);
  const Vec4 error = cfg_.p_desired.vec() - p_hat;
  error_history_.push_back(error);
  const Vec4 e_dot = estimate_velocity(error_history_, cfg_.control_rate_hz);
  const Vec4 u = pd_action(error, e_dot, cfg_.gains);

  // Lateral/vertical correction applied orthogonally to the travel axis, so
  // forward progress per control step is exactly v_x / tau_u.
  const Vec3 x_axis = ee_.x_axis();
  Vec3 lateral(0.0, u[0], u[1]);
  lateral -= lateral.dot(x_axis) * x_axis;
  const double forward_step = cfg_.v_x_cm_s / cfg_.control_rate_hz;
  ee_.position += lateral + forward_step * x_axis;
  ee_.rpy.y() += u[2];
  ee_.rpy.z() += u[3];
  ee_.wrap_rpy();
  forward_travel_ += std::abs(forward_step);

  // Contact monitor: spring force from the deepest penetrating patch.
  const double clearance =
      min_patch_clearance(sensor_, params_.patch_resolution, scenario_.limb, ee_, t);
  const double penetration = std::max(0.0, -clearance);
  const double force = cfg_.force_per_cm_n * penetration;

  ServoLogRow row;
  row.step = control_steps_++;
  row.t_s = t;
  row.position = ee_.position;
  row.rpy = ee_.rpy;
  row.p_hat = p_hat;
  row.p_true = relative_pose(scenario_.limb, ee_, t).vec();
  row.u = u;
  row.clearance_cm = clearance;
  row.force_n = force;
  row.contact = penetration > 0.0;
  log_.rows.push_back(row);

  if (force > cfg_.force_limit_n) {
    halted_ = true;
    log_.halted = true;
  }
}

ServoLog ServoSimulation::finish() {
  while (!done()) capture_tick();
  log_.outcome = classify_outcome(log_, scenario_, cfg_);
  return log_;
}

ServoLog run_servo(const Scenario& scenario, PoseEstimator& estimator, const ServoConfig& cfg,
                   const SensorArraySpec& sensor, const CapModelParams& params,
                   std::mt19937_64 rng) {
  ServoSimulation sim(scenario, estimator, cfg, sensor, params, std::move(rng));
  return sim.finish();
}

ServoOutcome classify_outcome(const ServoLog& log, const Scenario& scenario,
                              const ServoConfig& cfg) {
  if (log.rows.empty()) return ServoOutcome::lost_track;
  // Runs stop immediately after a force-limit breach, so a stored log ends
  // with an over-limit row exactly when the monitor halted the run.
  if (log.halted || log.rows.back().force_n > cfg.force_limit_n)
    return ServoOutcome::contact_halt;

  const std::size_t n = log.rows.size();
  const std::size_t tail_begin = n - std::max<std::size_t>(1, n / 10);
  double mean_clearance = 0.0;
  for (std::size_t i = tail_begin; i < n; ++i) mean_clearance += log.rows[i].clearance_cm;
  mean_clearance /= static_cast<double>(n - tail_begin);
  if (mean_clearance >= scenario.success_clearance_cm) return ServoOutcome::lost_track;

  if (scenario.joint_arc_cm >= 0.0) {
    const double final_arc = arc_coordinate(scenario.limb, log.rows.back().position,
                                            log.rows.back().t_s);
    if (final_arc <= scenario.joint_arc_cm) return ServoOutcome::lost_track;
  }
  return ServoOutcome::success;
}

}  // namespace capserv
