#include "capserv/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "capserv/rng.hpp"

namespace capserv {

namespace {

double sample_error(const EvalSample& s, HeatmapKind kind) {
  const Vec4 d = (s.pred - s.truth).cwiseAbs();
  if (kind == HeatmapKind::translational) return 0.5 * (d[0] + d[1]);
  return 0.5 * rad_to_deg(d[2] + d[3]);
}

Eigen::Vector2d sample_axes(const EvalSample& s, HeatmapKind kind) {
  if (kind == HeatmapKind::translational) return {s.truth[0], s.truth[1]};
  return {rad_to_deg(s.truth[2]), rad_to_deg(s.truth[3])};
}

}  // namespace

std::vector<EvalSample> evaluate_windows(const WindowedData& data, const MlpModel& model) {
  std::vector<EvalSample> out;
  out.reserve(data.samples.size());
  if (data.samples.empty()) return out;

  const int n = static_cast<int>(data.samples.size());
  constexpr int kChunk = 4096;
  for (int begin = 0; begin < n; begin += kChunk) {
    const int end = std::min(n, begin + kChunk);
    Eigen::MatrixXd X(end - begin, kInputDim);
    for (int i = begin; i < end; ++i) X.row(i - begin) = data.samples[i].x.transpose();
    const Eigen::MatrixXd Y = model.predict_batch(X);
    for (int i = begin; i < end; ++i)
      out.push_back({data.samples[i].y, Y.row(i - begin).transpose()});
  }
  return out;
}

std::vector<EvalSample> evaluate_dataset(const Dataset& dataset, const MlpModel& model) {
  return evaluate_windows(window_dataset(dataset.trajectories), model);
}

HeatmapGrid range_heatmap(const std::vector<EvalSample>& samples, HeatmapKind kind) {
  if (samples.empty()) throw std::invalid_argument("range_heatmap: empty sample set");

  HeatmapGrid grid;
  grid.kind = kind;
  grid.cell_size = kind == HeatmapKind::translational ? 1.0 : 2.0;
  grid.window_half_width = kind == HeatmapKind::translational ? 1.5 : 3.0;

  double a_lo = std::numeric_limits<double>::infinity();
  double a_hi = -a_lo;
  double b_lo = a_lo;
  double b_hi = -a_lo;
  for (const auto& s : samples) {
    const auto ab = sample_axes(s, kind);
    a_lo = std::min(a_lo, ab.x());
    a_hi = std::max(a_hi, ab.x());
    b_lo = std::min(b_lo, ab.y());
    b_hi = std::max(b_hi, ab.y());
  }
  const double cs = grid.cell_size;
  const int ia_lo = static_cast<int>(std::floor(a_lo / cs));
  const int ia_hi = static_cast<int>(std::ceil(a_hi / cs));
  const int ib_lo = static_cast<int>(std::floor(b_lo / cs));
  const int ib_hi = static_cast<int>(std::ceil(b_hi / cs));
  const int na = ia_hi - ia_lo + 1;
  const int nb = ib_hi - ib_lo + 1;

  std::vector<double> sums(static_cast<std::size_t>(na) * nb, 0.0);
  std::vector<int> counts(static_cast<std::size_t>(na) * nb, 0);

  for (const auto& s : samples) {
    const auto ab = sample_axes(s, kind);
    const double err = sample_error(s, kind);
    // A sample lands in every cell whose center is within the half-width
    // window of the sample's true pose.
    const int ca_lo = std::max(ia_lo, static_cast<int>(std::ceil((ab.x() - grid.window_half_width) / cs)));
    const int ca_hi = std::min(ia_hi, static_cast<int>(std::floor((ab.x() + grid.window_half_width) / cs)));
    const int cb_lo = std::max(ib_lo, static_cast<int>(std::ceil((ab.y() - grid.window_half_width) / cs)));
    const int cb_hi = std::min(ib_hi, static_cast<int>(std::floor((ab.y() + grid.window_half_width) / cs)));
    for (int ia = ca_lo; ia <= ca_hi; ++ia) {
      for (int ib = cb_lo; ib <= cb_hi; ++ib) {
        const std::size_t idx = static_cast<std::size_t>(ia - ia_lo) * nb + (ib - ib_lo);
        sums[idx] += err;
        counts[idx] += 1;
      }
    }
  }

  grid.cells.reserve(sums.size());
  for (int ia = ia_lo; ia <= ia_hi; ++ia) {
    for (int ib = ib_lo; ib <= ib_hi; ++ib) {
      const std::size_t idx = static_cast<std::size_t>(ia - ia_lo) * nb + (ib - ib_lo);
      HeatmapCell cell;
      cell.center_a = ia * cs;
      cell.center_b = ib * cs;
      cell.count = counts[idx];
      cell.mean_error = counts[idx] > 0 ? sums[idx] / counts[idx] : 0.0;
      grid.cells.push_back(cell);
    }
  }

  const std::vector<std::pair<double, double>> edges =
      kind == HeatmapKind::translational
          ? std::vector<std::pair<double, double>>{{0.0, 10.0}, {10.0, 15.0}, {15.0, 1e9}}
          : std::vector<std::pair<double, double>>{{0.0, 30.0}, {30.0, 45.0 + 1e-9}};
  for (const auto& [lo, hi] : edges) {
    BandSummary band{lo, hi, 0.0, 0};
    for (const auto& s : samples) {
      const double r = sample_axes(s, kind).norm();
      if (r >= lo && r < hi) {
        band.mean_error += sample_error(s, kind);
        band.count += 1;
      }
    }
    if (band.count > 0) band.mean_error /= band.count;
    grid.bands.push_back(band);
  }
  return grid;
}

std::vector<LimbErrorRow> per_limb_error_table(
    const MlpModel& model, const std::vector<std::pair<std::string, const Dataset*>>& datasets) {
  std::vector<LimbErrorRow> rows;
  Vec4 mae_sum = Vec4::Zero();
  Vec4 sd_sum = Vec4::Zero();
  int total = 0;

  for (const auto& [name, dataset] : datasets) {
    const auto samples = evaluate_dataset(*dataset, model);
    std::vector<Vec4> pred, truth;
    pred.reserve(samples.size());
    truth.reserve(samples.size());
    for (const auto& s : samples) {
      pred.push_back(s.pred);
      truth.push_back(s.truth);
    }
    LimbErrorRow row;
    row.station = name;
    row.stats = pose_errors(pred, truth);
    mae_sum += row.stats.mae;
    sd_sum += row.stats.sd;
    total += row.stats.n;
    rows.push_back(std::move(row));
  }

  if (!rows.empty()) {
    LimbErrorRow avg;
    avg.station = "average";
    avg.stats.mae = mae_sum / static_cast<double>(rows.size());
    avg.stats.sd = sd_sum / static_cast<double>(rows.size());
    avg.stats.d_eps_cm = 0.5 * (avg.stats.mae[0] + avg.stats.mae[1]);
    avg.stats.theta_eps_deg = 0.5 * (avg.stats.mae[2] + avg.stats.mae[3]);
    avg.stats.n = total;
    rows.push_back(std::move(avg));
  }
  return rows;
}

namespace {

Vec4 mae_of(const std::vector<EvalSample>& samples) {
  std::vector<Vec4> pred, truth;
  pred.reserve(samples.size());
  truth.reserve(samples.size());
  for (const auto& s : samples) {
    pred.push_back(s.pred);
    truth.push_back(s.truth);
  }
  return pose_errors(pred, truth).mae;
}

}  // namespace

CrossSizeReport cross_size_eval(double train_radius_cm, const std::vector<double>& test_radii,
                                const CollectionSpec& spec, const SensorArraySpec& sensor,
                                const CapModelParams& params, const TrainConfig& train_cfg,
                                std::uint64_t seed) {
  CrossSizeReport report;
  report.train_radius_cm = train_radius_cm;

  const LimbStation train_station = cylinder_station("train", train_radius_cm);
  auto collect_rng = substream(seed, "cross_size/collect");
  const Dataset train_data =
      collect_trajectories(spec, train_station, sensor, params, collect_rng);
  const WindowedData windows = window_dataset(train_data.trajectories);

  TrainConfig cfg = train_cfg;
  cfg.seed = splitmix64(seed ^ fnv1a64("cross_size/train"));
  const TrainResult trained = mlp_train(windows, cfg);

  // In-distribution reference: the held-out validation trajectories.
  WindowedData val;
  for (std::size_t i = 0; i < windows.samples.size(); ++i) {
    if (std::binary_search(trained.val_trajectories.begin(), trained.val_trajectories.end(),
                           windows.traj[i])) {
      val.samples.push_back(windows.samples[i]);
      val.traj.push_back(windows.traj[i]);
    }
  }
  report.in_dist_mae = val.samples.empty()
                           ? Vec4::Zero()
                           : mae_of(evaluate_windows(val, trained.model));

  for (std::size_t k = 0; k < test_radii.size(); ++k) {
    const LimbStation station = cylinder_station("test", test_radii[k]);
    auto rng = substream(seed, "cross_size/eval/" + std::to_string(k));
    const Dataset data = collect_trajectories(spec, station, sensor, params, rng);
    CrossSizeEntry entry;
    entry.radius_cm = test_radii[k];
    entry.mae = mae_of(evaluate_dataset(data, trained.model));
    report.entries.push_back(entry);
  }
  return report;
}

void TaskSpec::validate() const {
  if (trials < 1) throw std::invalid_argument("TaskSpec: trials must be >= 1");
  for (double a : joint_angles_deg)
    if (a < 0.0 || deg_to_rad(a) > kMaxJointAngle + 1e-12)
      throw std::invalid_argument("TaskSpec: joint angle outside articulation range");
}

TaskSuiteResult run_task_suite(const TaskSpec& spec, const MlpModel& model,
                               const ServoConfig& servo_cfg, const SensorArraySpec& sensor,
                               const CapModelParams& params, std::uint64_t seed) {
  spec.validate();
  TaskSuiteResult result;

  for (double angle : spec.joint_angles_deg) {
    TaskCellResult cell;
    cell.task = spec.task;
    cell.angle_deg = angle;
    cell.trials = spec.trials;

    std::vector<std::vector<double>> curves;
    double est_distance_sum = 0.0;
    int est_distance_runs = 0;
    double band_fraction_sum = 0.0;

    for (int trial = 0; trial < spec.trials; ++trial) {
      const std::string stream = std::string("task/") + to_string(spec.task) + "/" +
                                 std::to_string(angle) + "/" + std::to_string(trial);
      auto rng = substream(seed, stream);

      std::uniform_real_distribution<double> jitter_cm(-1.0, 1.0);
      std::uniform_real_distribution<double> jitter_rad(-0.05, 0.05);
      RelativePose jitter;
      jitter.dy = jitter_cm(rng);
      jitter.dz = jitter_cm(rng);
      jitter.ty = jitter_rad(rng);
      jitter.tz = jitter_rad(rng);

      const Scenario scenario = make_task_scenario(spec.task, angle, spec.profile, jitter);
      ServoConfig cfg = servo_cfg;
      cfg.run_length_cm = task_run_length_cm(spec.task, spec.profile);

      MlpPoseEstimator estimator(model);
      const ServoLog log = run_servo(scenario, estimator, cfg, sensor, params, std::move(rng));

      std::vector<double> curve;
      curve.reserve(log.rows.size());
      int in_band = 0;
      for (const auto& row : log.rows) {
        curve.push_back(std::hypot(row.p_hat[0], row.p_hat[1]));
        if (row.clearance_cm >= 2.0 && row.clearance_cm <= 8.0) ++in_band;
      }
      const double band_fraction =
          log.rows.empty() ? 0.0 : static_cast<double>(in_band) / log.rows.size();
      band_fraction_sum += band_fraction;

      bool succeeded;
      if (spec.task == TaskKind::moving_limb) {
        succeeded = !log.halted && band_fraction >= 0.95;
      } else {
        succeeded = log.outcome == ServoOutcome::success;
      }
      if (succeeded) {
        ++cell.successes;
        if (!curve.empty()) {
          double mean = 0.0;
          for (double v : curve) mean += v;
          est_distance_sum += mean / curve.size();
          ++est_distance_runs;
        }
      }
      curves.push_back(std::move(curve));
    }

    cell.clearance_in_band_fraction = band_fraction_sum / spec.trials;
    cell.mean_est_distance_cm = est_distance_runs > 0
                                    ? est_distance_sum / est_distance_runs
                                    : std::numeric_limits<double>::quiet_NaN();

    std::size_t min_len = std::numeric_limits<std::size_t>::max();
    for (const auto& c : curves) min_len = std::min(min_len, c.size());
    if (min_len == std::numeric_limits<std::size_t>::max()) min_len = 0;
    cell.mean_distance_curve.assign(min_len, 0.0);
    for (const auto& c : curves)
      for (std::size_t i = 0; i < min_len; ++i) cell.mean_distance_curve[i] += c[i];
    for (auto& v : cell.mean_distance_curve) v /= static_cast<double>(curves.size());

    result.cells.push_back(std::move(cell));
  }
  return result;
}

}  // namespace capserv
