#pragma once

#include <deque>
#include <memory>
#include <random>
#include <vector>

#include "capserv/geometry.hpp"
#include "capserv/mlp.hpp"
#include "capserv/sensor.hpp"
#include "capserv/types.hpp"

namespace capserv {

/// Diagonal PD gains over (dy, dz, ty, tz).
struct Gains {
  Vec4 kp{0.025, 0.025, 0.1, 0.1};
  Vec4 kd{0.0125, 0.0125, 0.025, 0.025};

  void validate() const {
    if ((kp.array() < 0.0).any() || (kd.array() < 0.0).any())
      throw std::invalid_argument("Gains: entries must be >= 0");
  }
};

/// Elementwise PD law u = Kp.e + Kd.e_dot.
Vec4 pd_action(const Vec4& e, const Vec4& e_dot, const Gains& gains);

/// Backward difference of the error history at the control rate; zero until
/// two samples exist.
Vec4 estimate_velocity(const std::vector<Vec4>& error_history, double control_rate_hz);

struct ServoConfig {
  RelativePose p_desired{0.0, 5.0, 0.0, 0.0};
  double v_x_cm_s = 2.0;         // forward speed along the ee X axis (< 0 for proximal)
  int capture_rate_hz = 100;     // tau_d
  int control_rate_hz = 10;      // tau_u
  double force_limit_n = 10.0;
  double force_per_cm_n = 50.0;  // contact spring stiffness
  double run_length_cm = 45.0;   // forward travel before the run completes
  int window_length = kWindowLength;
  Gains gains;

  void validate() const;
};

/// One row per control step.
struct ServoLogRow {
  int step = 0;
  double t_s = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();
  Vec4 p_hat = Vec4::Zero();
  Vec4 p_true = Vec4::Zero();
  Vec4 u = Vec4::Zero();
  double clearance_cm = 0.0;  // smallest sensor patch clearance
  double force_n = 0.0;
  bool contact = false;
};

enum class ServoOutcome { success, lost_track, contact_halt };

const char* to_string(ServoOutcome o);

struct ServoLog {
  std::vector<ServoLogRow> rows;
  ServoOutcome outcome = ServoOutcome::lost_track;
  bool halted = false;
};

/// A servo run: the limb, where the end effector starts, and what counts as
/// finishing. joint_arc_cm < 0 means the limb has no joint to pass.
struct Scenario {
  LimbModel limb;
  EEPose start;
  double joint_arc_cm = -1.0;
  double success_clearance_cm = 8.0;
};

/// Pose estimator interface used by the servo loop. The observation gives
/// stub estimators access to ground truth; the learned estimator ignores it.
class PoseEstimator {
 public:
  virtual ~PoseEstimator() = default;
  virtual Vec4 estimate(const std::deque<CapFrame>& window, const LimbModel& limb,
                        const EEPose& ee, double t) = 0;
};

class MlpPoseEstimator : public PoseEstimator {
 public:
  explicit MlpPoseEstimator(MlpModel model) : model_(std::move(model)) {}
  Vec4 estimate(const std::deque<CapFrame>& window, const LimbModel&, const EEPose&,
                double) override;

 private:
  MlpModel model_;
};

/// Returns ground truth plus an optional constant bias; debugging and
/// closed-loop analysis path.
class TruePoseEstimator : public PoseEstimator {
 public:
  explicit TruePoseEstimator(Vec4 bias = Vec4::Zero()) : bias_(bias) {}
  Vec4 estimate(const std::deque<CapFrame>&, const LimbModel& limb, const EEPose& ee,
                double t) override;

 private:
  Vec4 bias_;
};

/// Step-by-step servo simulation following the dual-rate loop: capacitance
/// captured every tick, a control update every capture_rate/control_rate
/// ticks once the window is full. The simulator clock is virtual, so runs are
/// deterministic under a fixed seed.
class ServoSimulation {
 public:
  ServoSimulation(const Scenario& scenario, PoseEstimator& estimator, const ServoConfig& cfg,
                  const SensorArraySpec& sensor, const CapModelParams& params,
                  std::mt19937_64 rng);

  /// Advances one capture tick; returns true if a control update ran.
  bool capture_tick();

  bool done() const;
  ServoLog finish();  // runs to completion and classifies the outcome

  const EEPose& ee() const { return ee_; }
  const std::deque<CapFrame>& window() const { return window_; }
  const ServoLog& log() const { return log_; }
  double forward_travel_cm() const { return forward_travel_; }

 private:
  void control_update();

  const Scenario scenario_;
  PoseEstimator& estimator_;
  ServoConfig cfg_;
  SensorArraySpec sensor_;
  CapModelParams params_;
  std::mt19937_64 rng_;

  EEPose ee_;
  std::deque<CapFrame> window_;
  std::vector<Vec4> error_history_;
  ServoLog log_;
  int tick_ = 0;
  int control_steps_ = 0;
  int max_ticks_ = 0;
  double forward_travel_ = 0.0;
  double last_clearance_ = 0.0;
  bool halted_ = false;
};

/// Runs the loop to completion.
ServoLog run_servo(const Scenario& scenario, PoseEstimator& estimator, const ServoConfig& cfg,
                   const SensorArraySpec& sensor, const CapModelParams& params,
                   std::mt19937_64 rng);

/// Pure function of a stored log and its scenario: contact_halt if the force
/// monitor tripped; success when the run passed the joint (if any) and the
/// mean clearance over the final tenth of the run stays under the bound;
/// lost_track otherwise.
ServoOutcome classify_outcome(const ServoLog& log, const Scenario& scenario,
                              const ServoConfig& cfg);

}  // namespace capserv
