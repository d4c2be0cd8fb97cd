#include "config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "capserv/io.hpp"

namespace capserv::cli {

using nlohmann::json;

namespace {

json default_config_json() {
  return json{
      {"master_seed", 1},
      {"out_dir", ""},
      {"sensor",
       {{"electrode_size_cm", 3.0},
        {"plate_width_cm", 11.5},
        {"plate_depth_cm", 8.5},
        {"pitch_lateral_cm", 3.75},
        {"pitch_longitudinal_cm", 4.5}}},
      {"cap_model",
       {{"gain", 1.0},
        {"baseline", 1.0},
        {"noise_sd", "auto"},
        {"crosstalk", 0.05},
        {"patch_resolution", 6},
        {"range_cutoff_cm", 40.0}}},
      {"profile",
       {{"wrist_cm", 15.5},
        {"forearm_cm", 25.5},
        {"upper_arm_cm", 27.0},
        {"ankle_cm", 23.0},
        {"shin_cm", 32.5},
        {"knee_cm", 31.0}}},
      {"collect",
       {{"trajectories_per_station", 60},
        {"capture_rate_hz", 100.0},
        {"stations", json::array({"wrist", "forearm", "upper_arm", "ankle", "shin", "knee"})},
        {"dy_min_cm", -10.0},
        {"dy_max_cm", 10.0},
        {"dz_min_cm", 0.0},
        {"dz_max_cm", 15.0},
        {"ty_min_rad", -M_PI / 8.0},
        {"ty_max_rad", M_PI / 8.0},
        {"tz_min_rad", -M_PI / 8.0},
        {"tz_max_rad", M_PI / 8.0},
        {"v_lin_min_cm_s", 3.0},
        {"v_lin_max_cm_s", 10.0},
        {"v_ang_min_rad_s", M_PI / 20.0},
        {"v_ang_max_rad_s", M_PI / 8.0},
        {"pos_tolerance_cm", 0.1},
        {"ang_tolerance_rad", 0.01}}},
      {"train",
       {{"epochs", 20},
        {"batch_size", 128},
        {"learning_rate", 1e-3},
        {"beta1", 0.9},
        {"beta2", 0.999},
        {"adam_eps", 1e-8},
        {"angle_scale_cm_per_rad", 10.0},
        {"val_fraction", 0.1}}},
      {"servo",
       {{"v_x_cm_s", 2.0},
        {"capture_rate_hz", 100},
        {"control_rate_hz", 10},
        {"force_limit_n", 10.0},
        {"force_per_cm_n", 50.0},
        {"run_length_cm", 45.0},
        {"p_desired_dy_cm", 0.0},
        {"p_desired_dz_cm", 5.0},
        {"p_desired_ty_rad", 0.0},
        {"p_desired_tz_rad", 0.0},
        {"kp", json::array({0.025, 0.025, 0.1, 0.1})},
        {"kd", json::array({0.0125, 0.0125, 0.025, 0.025})},
        {"task", "bent_elbow"},
        {"joint_angle_deg", 90.0},
        {"stub_estimator", false},
        {"strict", false}}},
      {"report",
       {{"linear_runs", 20},
        {"rotation_runs", 20},
        {"trials", 5},
        {"tasks", json::array({"bent_elbow", "forearm_tilt", "bent_knee", "moving_limb"})},
        {"cross_size_train_radius_cm", 4.0},
        {"cross_size_test_radii_cm", json::array({2.0, 2.8, 4.0, 5.2, 6.4})}}},
  };
}

void reject_unknown_keys(const json& user, const json& defaults, const std::string& path) {
  if (!user.is_object()) return;
  for (const auto& [key, value] : user.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    if (!defaults.is_object() || !defaults.contains(key))
      throw ConfigError("unknown config key: " + here);
    if (value.is_object()) reject_unknown_keys(value, defaults.at(key), here);
  }
}

void deep_merge(json& base, const json& user) {
  if (!user.is_object()) {
    base = user;
    return;
  }
  for (const auto& [key, value] : user.items()) {
    if (value.is_object() && base.contains(key) && base.at(key).is_object())
      deep_merge(base.at(key), value);
    else
      base[key] = value;
  }
}

json parse_override_value(const std::string& raw) {
  // Accept JSON literals (numbers, booleans, arrays); anything that does not
  // parse is taken as a plain string.
  const json parsed = json::parse(raw, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  return json(raw);
}

void apply_override(json& config, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like key.path=value: " + spec);
  const std::string path = spec.substr(0, eq);
  const json value = parse_override_value(spec.substr(eq + 1));

  json* node = &config;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError("empty override path");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i])) throw ConfigError("unknown config key: " + path);
    node = &node->at(parts[i]);
  }
  if (!node->contains(parts.back())) throw ConfigError("unknown config key: " + path);
  (*node)[parts.back()] = value;
}

double num(const json& j, const char* key) { return j.at(key).get<double>(); }
int num_i(const json& j, const char* key) { return j.at(key).get<int>(); }

RunConfig from_json(const json& j) {
  RunConfig cfg;
  cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  cfg.out_dir = j.at("out_dir").get<std::string>();

  const json& s = j.at("sensor");
  cfg.sensor.electrode_size_cm = num(s, "electrode_size_cm");
  cfg.sensor.plate_width_cm = num(s, "plate_width_cm");
  cfg.sensor.plate_depth_cm = num(s, "plate_depth_cm");
  cfg.sensor.pitch_lateral_cm = num(s, "pitch_lateral_cm");
  cfg.sensor.pitch_longitudinal_cm = num(s, "pitch_longitudinal_cm");

  const json& cm = j.at("cap_model");
  cfg.cap_model.gain = num(cm, "gain");
  cfg.cap_model.baseline = num(cm, "baseline");
  cfg.cap_model.crosstalk = num(cm, "crosstalk");
  cfg.cap_model.patch_resolution = num_i(cm, "patch_resolution");
  cfg.cap_model.range_cutoff_cm = num(cm, "range_cutoff_cm");
  if (cm.at("noise_sd").is_string()) {
    if (cm.at("noise_sd").get<std::string>() != "auto")
      throw ConfigError("cap_model.noise_sd must be a number or \"auto\"");
    cfg.auto_noise = true;
    cfg.cap_model.noise_sd = 0.0;
  } else {
    cfg.auto_noise = false;
    cfg.cap_model.noise_sd = cm.at("noise_sd").get<double>();
  }

  const json& p = j.at("profile");
  cfg.profile.circumference_cm = {num(p, "wrist_cm"),     num(p, "forearm_cm"),
                                  num(p, "upper_arm_cm"), num(p, "ankle_cm"),
                                  num(p, "shin_cm"),      num(p, "knee_cm")};

  const json& c = j.at("collect");
  cfg.collect.trajectories_per_station = num_i(c, "trajectories_per_station");
  cfg.collect.capture_rate_hz = num(c, "capture_rate_hz");
  cfg.collect.pose_space.dy_min_cm = num(c, "dy_min_cm");
  cfg.collect.pose_space.dy_max_cm = num(c, "dy_max_cm");
  cfg.collect.pose_space.dz_min_cm = num(c, "dz_min_cm");
  cfg.collect.pose_space.dz_max_cm = num(c, "dz_max_cm");
  cfg.collect.pose_space.ty_min_rad = num(c, "ty_min_rad");
  cfg.collect.pose_space.ty_max_rad = num(c, "ty_max_rad");
  cfg.collect.pose_space.tz_min_rad = num(c, "tz_min_rad");
  cfg.collect.pose_space.tz_max_rad = num(c, "tz_max_rad");
  cfg.collect.speeds.v_lin_min_cm_s = num(c, "v_lin_min_cm_s");
  cfg.collect.speeds.v_lin_max_cm_s = num(c, "v_lin_max_cm_s");
  cfg.collect.speeds.v_ang_min_rad_s = num(c, "v_ang_min_rad_s");
  cfg.collect.speeds.v_ang_max_rad_s = num(c, "v_ang_max_rad_s");
  cfg.collect.pos_tolerance_cm = num(c, "pos_tolerance_cm");
  cfg.collect.ang_tolerance_rad = num(c, "ang_tolerance_rad");
  cfg.stations = c.at("stations").get<std::vector<std::string>>();
  for (const auto& name : cfg.stations) {
    bool known = false;
    for (const auto& r : kStationRanges) known = known || name == r.name;
    if (!known) throw ConfigError("unknown station: " + name);
  }

  const json& t = j.at("train");
  cfg.train.epochs = num_i(t, "epochs");
  cfg.train.batch_size = num_i(t, "batch_size");
  cfg.train.learning_rate = num(t, "learning_rate");
  cfg.train.beta1 = num(t, "beta1");
  cfg.train.beta2 = num(t, "beta2");
  cfg.train.adam_eps = num(t, "adam_eps");
  cfg.train.angle_scale = num(t, "angle_scale_cm_per_rad");
  cfg.train.val_fraction = num(t, "val_fraction");

  const json& sv = j.at("servo");
  cfg.servo.v_x_cm_s = num(sv, "v_x_cm_s");
  cfg.servo.capture_rate_hz = num_i(sv, "capture_rate_hz");
  cfg.servo.control_rate_hz = num_i(sv, "control_rate_hz");
  cfg.servo.force_limit_n = num(sv, "force_limit_n");
  cfg.servo.force_per_cm_n = num(sv, "force_per_cm_n");
  cfg.servo.run_length_cm = num(sv, "run_length_cm");
  cfg.servo.p_desired = RelativePose{num(sv, "p_desired_dy_cm"), num(sv, "p_desired_dz_cm"),
                                     num(sv, "p_desired_ty_rad"), num(sv, "p_desired_tz_rad")};
  const auto kp = sv.at("kp").get<std::vector<double>>();
  const auto kd = sv.at("kd").get<std::vector<double>>();
  if (kp.size() != 4 || kd.size() != 4)
    throw ConfigError("servo.kp and servo.kd must have 4 entries");
  cfg.servo.gains.kp = Vec4(kp[0], kp[1], kp[2], kp[3]);
  cfg.servo.gains.kd = Vec4(kd[0], kd[1], kd[2], kd[3]);
  cfg.servo_task = sv.at("task").get<std::string>();
  cfg.servo_angle_deg = num(sv, "joint_angle_deg");
  cfg.stub_estimator = sv.at("stub_estimator").get<bool>();
  cfg.strict = sv.at("strict").get<bool>();

  const json& r = j.at("report");
  cfg.report.linear_runs = num_i(r, "linear_runs");
  cfg.report.rotation_runs = num_i(r, "rotation_runs");
  cfg.report.trials = num_i(r, "trials");
  cfg.report.tasks = r.at("tasks").get<std::vector<std::string>>();
  cfg.report.cross_size_train_radius_cm = num(r, "cross_size_train_radius_cm");
  cfg.report.cross_size_test_radii_cm =
      r.at("cross_size_test_radii_cm").get<std::vector<double>>();
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json j = default_config_json();
  j["master_seed"] = cfg.master_seed;
  j["out_dir"] = cfg.out_dir;
  j["sensor"]["electrode_size_cm"] = cfg.sensor.electrode_size_cm;
  j["sensor"]["plate_width_cm"] = cfg.sensor.plate_width_cm;
  j["sensor"]["plate_depth_cm"] = cfg.sensor.plate_depth_cm;
  j["sensor"]["pitch_lateral_cm"] = cfg.sensor.pitch_lateral_cm;
  j["sensor"]["pitch_longitudinal_cm"] = cfg.sensor.pitch_longitudinal_cm;
  if (cfg.auto_noise)
    j["cap_model"]["noise_sd"] = "auto";
  else
    j["cap_model"]["noise_sd"] = cfg.cap_model.noise_sd;
  j["cap_model"]["gain"] = cfg.cap_model.gain;
  j["cap_model"]["baseline"] = cfg.cap_model.baseline;
  j["cap_model"]["crosstalk"] = cfg.cap_model.crosstalk;
  j["cap_model"]["patch_resolution"] = cfg.cap_model.patch_resolution;
  j["cap_model"]["range_cutoff_cm"] = cfg.cap_model.range_cutoff_cm;
  const char* profile_keys[6] = {"wrist_cm", "forearm_cm", "upper_arm_cm",
                                 "ankle_cm", "shin_cm",    "knee_cm"};
  for (int i = 0; i < 6; ++i) j["profile"][profile_keys[i]] = cfg.profile.circumference_cm[i];
  j["collect"]["trajectories_per_station"] = cfg.collect.trajectories_per_station;
  j["collect"]["capture_rate_hz"] = cfg.collect.capture_rate_hz;
  j["collect"]["stations"] = cfg.stations;
  j["collect"]["dy_min_cm"] = cfg.collect.pose_space.dy_min_cm;
  j["collect"]["dy_max_cm"] = cfg.collect.pose_space.dy_max_cm;
  j["collect"]["dz_min_cm"] = cfg.collect.pose_space.dz_min_cm;
  j["collect"]["dz_max_cm"] = cfg.collect.pose_space.dz_max_cm;
  j["collect"]["ty_min_rad"] = cfg.collect.pose_space.ty_min_rad;
  j["collect"]["ty_max_rad"] = cfg.collect.pose_space.ty_max_rad;
  j["collect"]["tz_min_rad"] = cfg.collect.pose_space.tz_min_rad;
  j["collect"]["tz_max_rad"] = cfg.collect.pose_space.tz_max_rad;
  j["collect"]["v_lin_min_cm_s"] = cfg.collect.speeds.v_lin_min_cm_s;
  j["collect"]["v_lin_max_cm_s"] = cfg.collect.speeds.v_lin_max_cm_s;
  j["collect"]["v_ang_min_rad_s"] = cfg.collect.speeds.v_ang_min_rad_s;
  j["collect"]["v_ang_max_rad_s"] = cfg.collect.speeds.v_ang_max_rad_s;
  j["collect"]["pos_tolerance_cm"] = cfg.collect.pos_tolerance_cm;
  j["collect"]["ang_tolerance_rad"] = cfg.collect.ang_tolerance_rad;
  j["train"]["epochs"] = cfg.train.epochs;
  j["train"]["batch_size"] = cfg.train.batch_size;
  j["train"]["learning_rate"] = cfg.train.learning_rate;
  j["train"]["beta1"] = cfg.train.beta1;
  j["train"]["beta2"] = cfg.train.beta2;
  j["train"]["adam_eps"] = cfg.train.adam_eps;
  j["train"]["angle_scale_cm_per_rad"] = cfg.train.angle_scale;
  j["train"]["val_fraction"] = cfg.train.val_fraction;
  j["servo"]["v_x_cm_s"] = cfg.servo.v_x_cm_s;
  j["servo"]["capture_rate_hz"] = cfg.servo.capture_rate_hz;
  j["servo"]["control_rate_hz"] = cfg.servo.control_rate_hz;
  j["servo"]["force_limit_n"] = cfg.servo.force_limit_n;
  j["servo"]["force_per_cm_n"] = cfg.servo.force_per_cm_n;
  j["servo"]["run_length_cm"] = cfg.servo.run_length_cm;
  j["servo"]["p_desired_dy_cm"] = cfg.servo.p_desired.dy;
  j["servo"]["p_desired_dz_cm"] = cfg.servo.p_desired.dz;
  j["servo"]["p_desired_ty_rad"] = cfg.servo.p_desired.ty;
  j["servo"]["p_desired_tz_rad"] = cfg.servo.p_desired.tz;
  j["servo"]["kp"] = {cfg.servo.gains.kp[0], cfg.servo.gains.kp[1], cfg.servo.gains.kp[2],
                      cfg.servo.gains.kp[3]};
  j["servo"]["kd"] = {cfg.servo.gains.kd[0], cfg.servo.gains.kd[1], cfg.servo.gains.kd[2],
                      cfg.servo.gains.kd[3]};
  j["servo"]["task"] = cfg.servo_task;
  j["servo"]["joint_angle_deg"] = cfg.servo_angle_deg;
  j["servo"]["stub_estimator"] = cfg.stub_estimator;
  j["servo"]["strict"] = cfg.strict;
  j["report"]["linear_runs"] = cfg.report.linear_runs;
  j["report"]["rotation_runs"] = cfg.report.rotation_runs;
  j["report"]["trials"] = cfg.report.trials;
  j["report"]["tasks"] = cfg.report.tasks;
  j["report"]["cross_size_train_radius_cm"] = cfg.report.cross_size_train_radius_cm;
  j["report"]["cross_size_test_radii_cm"] = cfg.report.cross_size_test_radii_cm;
  return j;
}

}  // namespace

std::string RunConfig::resolved_json() const { return to_json(*this).dump(2) + "\n"; }

std::string RunConfig::config_hash() const { return bytes_hash_hex(resolved_json()); }

CapModelParams RunConfig::effective_cap_model() const {
  if (auto_noise) return with_calibrated_noise(sensor, cap_model);
  return cap_model;
}

RunConfig load_config(const std::string& config_path,
                      const std::vector<std::string>& overrides) {
  json merged = default_config_json();
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw ConfigError("cannot open config file: " + config_path);
    json user = json::parse(is, nullptr, false);
    if (user.is_discarded()) throw ConfigError("config file is not valid JSON: " + config_path);
    reject_unknown_keys(user, merged, "");
    deep_merge(merged, user);
  }
  for (const auto& o : overrides) apply_override(merged, o);
  try {
    return from_json(merged);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

}  // namespace capserv::cli
