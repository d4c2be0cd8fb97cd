#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include "capserv/io.hpp"
#include "capserv/rng.hpp"

namespace capserv::cli {

namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void prepare_out_dir(const RunConfig& cfg) {
  if (cfg.out_dir.empty()) throw ConfigError("no output directory (use --out or out_dir)");
  fs::create_directories(cfg.out_dir);
  std::ofstream os(fs::path(cfg.out_dir) / "config.json", std::ios::binary);
  os << cfg.resolved_json();
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

void add_output(Manifest& m, const RunConfig& cfg, const std::string& name) {
  m.outputs.emplace_back(name, file_hash_hex(out_path(cfg, name)));
}

std::vector<LimbStation> selected_stations(const RunConfig& cfg) {
  const auto all = default_stations(cfg.profile);
  std::vector<LimbStation> out;
  for (const auto& name : cfg.stations) {
    for (const auto& st : all)
      if (st.name == name) out.push_back(st);
  }
  if (out.empty()) throw ConfigError("no stations selected");
  return out;
}

MlpModel load_model_checked(const RunConfig& cfg, const std::string& model_path) {
  if (model_path.empty()) throw ConfigError("no model file given (use --model)");
  if (!fs::exists(model_path)) throw DataError("model file not found: " + model_path);
  MlpModel model = MlpModel::load(model_path);
  if (cfg.servo.window_length * kNumElectrodes != MlpModel::layer_dims().front())
    throw ConfigError("servo window length does not match the model input size");
  return model;
}

std::vector<double> task_angles(TaskKind task) {
  switch (task) {
    case TaskKind::bent_elbow: return {0.0, 30.0, 60.0, 90.0, 120.0};
    case TaskKind::forearm_tilt:
    case TaskKind::bent_knee: return {0.0, 30.0, 60.0, 90.0};
    case TaskKind::moving_limb: return {0.0};
  }
  return {0.0};
}

}  // namespace

int cmd_collect(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  prepare_out_dir(cfg);
  const CapModelParams params = cfg.effective_cap_model();
  const auto stations = selected_stations(cfg);

  Manifest manifest;
  manifest.command = "collect";
  manifest.seed = cfg.master_seed;
  manifest.config_hash = cfg.config_hash();

  Dataset combined;
  combined.provenance.seed = cfg.master_seed;
  combined.provenance.spec_hash = cfg.config_hash();
  combined.provenance.description = "collect:all";

  std::size_t attempted = 0;
  for (const auto& station : stations) {
    auto rng = substream(cfg.master_seed, "collect/" + station.name);
    Dataset d = collect_trajectories(cfg.collect, station, cfg.sensor, params, rng);
    d.provenance.seed = cfg.master_seed;
    d.provenance.spec_hash = cfg.config_hash();
    attempted += static_cast<std::size_t>(cfg.collect.trajectories_per_station);

    const std::string file = "dataset_" + station.name + ".csv";
    write_dataset_csv(out_path(cfg, file), d);
    add_output(manifest, cfg, file);
    std::cout << "station=" << station.name << " trajectories=" << d.trajectories.size()
              << " rows=" << d.total_steps()
              << " aborted=" << d.provenance.aborted_trajectories << "\n";

    combined.provenance.aborted_trajectories += d.provenance.aborted_trajectories;
    for (auto& t : d.trajectories) combined.trajectories.push_back(std::move(t));
  }

  write_dataset_csv(out_path(cfg, "dataset.csv"), combined);
  add_output(manifest, cfg, "dataset.csv");
  manifest.parameters.emplace_back("stations", std::to_string(stations.size()));
  manifest.parameters.emplace_back("trajectories",
                                   std::to_string(combined.trajectories.size()));
  manifest.parameters.emplace_back("rows", std::to_string(combined.total_steps()));
  manifest.parameters.emplace_back("aborted",
                                   std::to_string(combined.provenance.aborted_trajectories));
  write_manifest(out_path(cfg, "manifest.json"), manifest);

  const double abort_fraction =
      attempted == 0 ? 0.0
                     : static_cast<double>(combined.provenance.aborted_trajectories) /
                           static_cast<double>(attempted);
  if (abort_fraction > 0.05)
    std::cerr << "warning: " << combined.provenance.aborted_trajectories << "/" << attempted
              << " trajectories aborted on contact (" << abort_fraction * 100.0 << "%)\n";

  std::cout << "rows=" << combined.total_steps()
            << " trajectories=" << combined.trajectories.size()
            << " elapsed_s=" << seconds_since(start) << "\n";
  return kExitOk;
}

int cmd_train(const RunConfig& cfg, const std::string& dataset_path) {
  const auto start = std::chrono::steady_clock::now();
  if (dataset_path.empty()) throw ConfigError("no dataset file given (use --dataset)");
  if (!fs::exists(dataset_path)) throw DataError("dataset not found: " + dataset_path);
  prepare_out_dir(cfg);

  Dataset dataset;
  try {
    dataset = read_dataset_csv(dataset_path);
  } catch (const std::exception& e) {
    throw DataError(std::string("malformed dataset: ") + e.what());
  }

  const WindowedData windows = window_dataset(dataset.trajectories);
  if (windows.samples.empty()) throw DataError("dataset yields no training windows");

  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = splitmix64(cfg.master_seed ^ fnv1a64("train"));
  const TrainResult result = mlp_train(windows, train_cfg);

  result.model.save(out_path(cfg, "model.bin"));
  write_loss_curve_csv(out_path(cfg, "loss.csv"), result.curve);

  Manifest manifest;
  manifest.command = "train";
  manifest.seed = cfg.master_seed;
  manifest.config_hash = cfg.config_hash();
  add_output(manifest, cfg, "model.bin");
  add_output(manifest, cfg, "loss.csv");
  manifest.parameters.emplace_back("dataset_hash", file_hash_hex(dataset_path));
  manifest.parameters.emplace_back("windows", std::to_string(windows.samples.size()));
  write_manifest(out_path(cfg, "manifest.json"), manifest);

  const auto& last = result.curve.back();
  std::cout << "windows=" << windows.samples.size() << " epochs=" << last.epoch
            << " train_mse=" << last.train_mse << " val_mse=" << last.val_mse
            << " model_hash=" << file_hash_hex(out_path(cfg, "model.bin"))
            << " elapsed_s=" << seconds_since(start) << "\n";
  return kExitOk;
}

int cmd_servo(const RunConfig& cfg, const std::string& model_path) {
  prepare_out_dir(cfg);
  const CapModelParams params = cfg.effective_cap_model();

  std::unique_ptr<PoseEstimator> estimator;
  if (cfg.stub_estimator) {
    estimator = std::make_unique<TruePoseEstimator>();
  } else {
    estimator = std::make_unique<MlpPoseEstimator>(load_model_checked(cfg, model_path));
  }

  const TaskKind task = task_from_string(cfg.servo_task);
  const Scenario scenario = make_task_scenario(task, cfg.servo_angle_deg, cfg.profile);
  ServoConfig servo_cfg = cfg.servo;
  servo_cfg.run_length_cm = task_run_length_cm(task, cfg.profile);

  auto rng = substream(cfg.master_seed, "servo");
  const ServoLog log =
      run_servo(scenario, *estimator, servo_cfg, cfg.sensor, params, std::move(rng));

  write_servo_log_csv(out_path(cfg, "servo_log.csv"), log);

  Manifest manifest;
  manifest.command = "servo";
  manifest.seed = cfg.master_seed;
  manifest.config_hash = cfg.config_hash();
  add_output(manifest, cfg, "servo_log.csv");
  manifest.parameters.emplace_back("task", cfg.servo_task);
  manifest.parameters.emplace_back("outcome", to_string(log.outcome));
  write_manifest(out_path(cfg, "manifest.json"), manifest);

  std::cout << "outcome=" << to_string(log.outcome) << " control_steps=" << log.rows.size()
            << "\n";
  if (cfg.strict && log.outcome != ServoOutcome::success) return kExitRun;
  return kExitOk;
}

int cmd_report(const RunConfig& cfg, const std::string& model_path) {
  const auto start = std::chrono::steady_clock::now();
  prepare_out_dir(cfg);
  const CapModelParams params = cfg.effective_cap_model();

  std::unique_ptr<MlpModel> model;
  if (!cfg.stub_estimator) model = std::make_unique<MlpModel>(load_model_checked(cfg, model_path));

  // Perfect-estimator debugging path: predictions equal ground truth.
  auto eval_with_stub = [](const Dataset& d) {
    std::vector<EvalSample> out;
    const WindowedData w = window_dataset(d.trajectories);
    out.reserve(w.samples.size());
    for (const auto& s : w.samples) out.push_back({s.y, s.y});
    return out;
  };
  auto eval = [&](const Dataset& d) {
    return cfg.stub_estimator ? eval_with_stub(d) : evaluate_dataset(d, *model);
  };

  Manifest manifest;
  manifest.command = "report";
  manifest.seed = cfg.master_seed;
  manifest.config_hash = cfg.config_hash();

  const auto stations = selected_stations(cfg);
  const LimbStation& sweep_station = stations.front();

  // Sensing-range sweeps and grids.
  {
    auto rng = substream(cfg.master_seed, "report/linear_sweep");
    const Dataset sweep =
        linear_sweep(sweep_station, cfg.sensor, params, cfg.report.linear_runs, rng);
    const HeatmapGrid grid = range_heatmap(eval(sweep), HeatmapKind::translational);
    write_heatmap_csv(out_path(cfg, "heatmap_translational.csv"), grid);
    write_band_summary_csv(out_path(cfg, "bands_translational.csv"), grid);
    add_output(manifest, cfg, "heatmap_translational.csv");
    add_output(manifest, cfg, "bands_translational.csv");
  }
  {
    auto rng = substream(cfg.master_seed, "report/rotation_sweep");
    const Dataset sweep =
        rotation_sweep(sweep_station, cfg.sensor, params, cfg.report.rotation_runs, rng);
    const HeatmapGrid grid = range_heatmap(eval(sweep), HeatmapKind::rotational);
    write_heatmap_csv(out_path(cfg, "heatmap_rotational.csv"), grid);
    write_band_summary_csv(out_path(cfg, "bands_rotational.csv"), grid);
    add_output(manifest, cfg, "heatmap_rotational.csv");
    add_output(manifest, cfg, "bands_rotational.csv");
  }

  // Per-station error table from fresh evaluation collections.
  {
    CollectionSpec eval_spec = cfg.collect;
    eval_spec.trajectories_per_station =
        std::max(5, cfg.collect.trajectories_per_station / 3);
    std::vector<Dataset> eval_sets;
    eval_sets.reserve(stations.size());
    for (const auto& station : stations) {
      auto rng = substream(cfg.master_seed, "report/eval/" + station.name);
      eval_sets.push_back(collect_trajectories(eval_spec, station, cfg.sensor, params, rng));
    }
    std::vector<std::pair<std::string, const Dataset*>> named;
    for (std::size_t i = 0; i < stations.size(); ++i)
      named.emplace_back(stations[i].name, &eval_sets[i]);

    std::vector<LimbErrorRow> rows;
    if (cfg.stub_estimator) {
      for (const auto& [name, d] : named) {
        LimbErrorRow row;
        row.station = name;
        const auto samples = eval_with_stub(*d);
        std::vector<Vec4> pred, truth;
        for (const auto& s : samples) {
          pred.push_back(s.pred);
          truth.push_back(s.truth);
        }
        row.stats = pose_errors(pred, truth);
        rows.push_back(std::move(row));
      }
    } else {
      rows = per_limb_error_table(*model, named);
    }
    write_limb_error_table_csv(out_path(cfg, "limb_error_table.csv"), rows);
    add_output(manifest, cfg, "limb_error_table.csv");
  }

  // Cross-size generalization (trains its own single-station model).
  if (!cfg.report.cross_size_test_radii_cm.empty() && !cfg.stub_estimator) {
    TrainConfig cross_cfg = cfg.train;
    const CrossSizeReport cross = cross_size_eval(
        cfg.report.cross_size_train_radius_cm, cfg.report.cross_size_test_radii_cm,
        cfg.collect, cfg.sensor, params, cross_cfg,
        splitmix64(cfg.master_seed ^ fnv1a64("report/cross_size")));
    write_cross_size_csv(out_path(cfg, "cross_size.csv"), cross);
    add_output(manifest, cfg, "cross_size.csv");
  }

  // Traversal task suite.
  if (!cfg.report.tasks.empty() && !cfg.stub_estimator) {
    TaskSuiteResult all;
    std::vector<LongFormatRow> curves;
    for (const auto& task_name : cfg.report.tasks) {
      TaskSpec task_spec;
      task_spec.task = task_from_string(task_name);
      task_spec.joint_angles_deg = task_angles(task_spec.task);
      task_spec.trials = cfg.report.trials;
      task_spec.profile = cfg.profile;
      const TaskSuiteResult r =
          run_task_suite(task_spec, *model, cfg.servo, cfg.sensor, params,
                         splitmix64(cfg.master_seed ^ fnv1a64("report/tasks")));
      for (const auto& cell : r.cells) {
        all.cells.push_back(cell);
        for (std::size_t i = 0; i < cell.mean_distance_curve.size(); ++i)
          curves.push_back({static_cast<double>(i), cell.angle_deg,
                            cell.mean_distance_curve[i], task_name});
      }
    }
    write_task_table_csv(out_path(cfg, "task_success.csv"), all);
    write_long_format_csv(out_path(cfg, "task_distance_curves.csv"), curves);
    add_output(manifest, cfg, "task_success.csv");
    add_output(manifest, cfg, "task_distance_curves.csv");
    for (const auto& cell : all.cells)
      std::cout << "task=" << to_string(cell.task) << " angle=" << cell.angle_deg
                << " success=" << cell.successes << "/" << cell.trials << "\n";
  }

  // Capacitance trace demo: lateral pass over the sweep station, raw and
  // smoothed/normalized for plotting.
  {
    const LimbModel& limb = sweep_station.limb;
    EEPose ee = pose_at_offset(limb, sweep_station.segment_index, sweep_station.station_cm,
                               RelativePose{-12.0, 5.0, 0.0, 0.0});
    const KStarFrame frame = k_star_frame(limb, ee.position);
    auto rng = substream(cfg.master_seed, "report/trace");
    std::vector<CapFrame> trace;
    const double step = 5.0 / cfg.collect.capture_rate_hz;  // 5 cm/s pass
    const int n_steps = static_cast<int>(std::lround(24.0 / step));
    for (int t = 0; t < n_steps; ++t) {
      CapFrame f = simulate_capacitance(cfg.sensor, params, limb, ee,
                                        t / cfg.collect.capture_rate_hz, rng);
      f.t = t;
      trace.push_back(f);
      ee.position += step * frame.axis_y;
    }
    write_capframe_csv(out_path(cfg, "trace_raw.csv"), trace);
    write_capframe_csv(out_path(cfg, "trace_smoothed.csv"), smooth_for_plotting(trace));
    add_output(manifest, cfg, "trace_raw.csv");
    add_output(manifest, cfg, "trace_smoothed.csv");
  }

  if (model) manifest.parameters.emplace_back("model_hash", file_hash_hex(model_path));
  write_manifest(out_path(cfg, "manifest.json"), manifest);
  std::cout << "report written to " << cfg.out_dir << " elapsed_s=" << seconds_since(start)
            << "\n";
  return kExitOk;
}

int cmd_reproduce(const RunConfig& cfg) {
  prepare_out_dir(cfg);

  RunConfig collect_cfg = cfg;
  collect_cfg.out_dir = (fs::path(cfg.out_dir) / "dataset").string();
  int rc = cmd_collect(collect_cfg);
  if (rc != kExitOk) return rc;

  RunConfig train_cfg = cfg;
  train_cfg.out_dir = (fs::path(cfg.out_dir) / "model").string();
  rc = cmd_train(train_cfg, (fs::path(collect_cfg.out_dir) / "dataset.csv").string());
  if (rc != kExitOk) return rc;

  const std::string model_path = (fs::path(train_cfg.out_dir) / "model.bin").string();

  RunConfig servo_cfg = cfg;
  servo_cfg.out_dir = (fs::path(cfg.out_dir) / "servo").string();
  rc = cmd_servo(servo_cfg, model_path);
  if (rc != kExitOk) return rc;

  RunConfig report_cfg = cfg;
  report_cfg.out_dir = (fs::path(cfg.out_dir) / "report").string();
  return cmd_report(report_cfg, model_path);
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRun;
  }
}

}  // namespace capserv::cli
