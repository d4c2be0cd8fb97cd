#include "capserv/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "capserv/rng.hpp"

namespace capserv {

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);  // binary: no newline translation
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return is;
}

std::vector<double> split_row(const std::string& line, std::size_t expected,
                              const std::string& path) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(std::stod(field));
  if (out.size() != expected)
    throw std::runtime_error("malformed row in " + path + ": " + line);
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

}  // namespace

std::string bytes_hash_hex(const std::string& bytes) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(bytes));
  return buf;
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream is = open_in(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return bytes_hash_hex(ss.str());
}

void write_capframe_csv(const std::string& path, const std::vector<CapFrame>& frames) {
  auto os = open_out(path);
  os << "t,c1,c2,c3,c4,c5,c6\n";
  for (const auto& f : frames) {
    os << f.t;
    for (double v : f.c) os << ',' << fmt9(v);
    os << '\n';
  }
}

void write_dataset_csv(const std::string& path, const Dataset& dataset) {
  auto os = open_out(path);
  os << "traj_id,t,c1,c2,c3,c4,c5,c6,dy,dz,ty,tz\n";
  for (std::size_t ti = 0; ti < dataset.trajectories.size(); ++ti) {
    for (const auto& s : dataset.trajectories[ti].steps) {
      os << ti << ',' << s.t;
      for (double v : s.frame.c) os << ',' << fmt9(v);
      os << ',' << fmt9(s.pose.dy) << ',' << fmt9(s.pose.dz) << ',' << fmt9(s.pose.ty)
         << ',' << fmt9(s.pose.tz) << '\n';
    }
  }
}

Dataset read_dataset_csv(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line) || line.rfind("traj_id,t,", 0) != 0)
    throw std::runtime_error("not a dataset csv: " + path);

  Dataset out;
  long current_traj = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto v = split_row(line, 12, path);
    const long traj = static_cast<long>(v[0]);
    if (traj != current_traj) {
      out.trajectories.emplace_back();
      current_traj = traj;
    }
    StepRecord s;
    s.t = static_cast<int>(v[1]);
    s.frame.t = s.t;
    for (int e = 0; e < kNumElectrodes; ++e) s.frame.c[e] = v[2 + e];
    s.pose = RelativePose{v[8], v[9], v[10], v[11]};
    out.trajectories.back().steps.push_back(std::move(s));
  }
  return out;
}

void write_servo_log_csv(const std::string& path, const ServoLog& log) {
  auto os = open_out(path);
  os << "step,t_s,x,y,z,tx,ty,tz,dy_hat,dz_hat,thy_hat,thz_hat,"
        "dy,dz,thy,thz,uy,uz,uty,utz,clearance,force,contact\n";
  for (const auto& r : log.rows) {
    os << r.step << ',' << fmt9(r.t_s);
    for (int i = 0; i < 3; ++i) os << ',' << fmt9(r.position[i]);
    for (int i = 0; i < 3; ++i) os << ',' << fmt9(r.rpy[i]);
    for (int i = 0; i < 4; ++i) os << ',' << fmt9(r.p_hat[i]);
    for (int i = 0; i < 4; ++i) os << ',' << fmt9(r.p_true[i]);
    for (int i = 0; i < 4; ++i) os << ',' << fmt9(r.u[i]);
    os << ',' << fmt9(r.clearance_cm) << ',' << fmt9(r.force_n) << ',' << (r.contact ? 1 : 0)
       << '\n';
  }
}

ServoLog read_servo_log_csv(const std::string& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line) || line.rfind("step,t_s,", 0) != 0)
    throw std::runtime_error("not a servo log csv: " + path);

  ServoLog log;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto v = split_row(line, 23, path);
    ServoLogRow r;
    r.step = static_cast<int>(v[0]);
    r.t_s = v[1];
    r.position = Vec3(v[2], v[3], v[4]);
    r.rpy = Vec3(v[5], v[6], v[7]);
    r.p_hat = Vec4(v[8], v[9], v[10], v[11]);
    r.p_true = Vec4(v[12], v[13], v[14], v[15]);
    r.u = Vec4(v[16], v[17], v[18], v[19]);
    r.clearance_cm = v[20];
    r.force_n = v[21];
    r.contact = v[22] != 0.0;
    log.rows.push_back(std::move(r));
  }
  return log;
}

void write_loss_curve_csv(const std::string& path, const std::vector<EpochLoss>& curve) {
  auto os = open_out(path);
  os << "epoch,train_mse,val_mse\n";
  for (const auto& e : curve)
    os << e.epoch << ',' << fmt9(e.train_mse) << ',' << fmt9(e.val_mse) << '\n';
}

void write_heatmap_csv(const std::string& path, const HeatmapGrid& grid) {
  auto os = open_out(path);
  os << (grid.kind == HeatmapKind::translational ? "dy_cm,dz_cm,mean_error_cm,count\n"
                                                 : "ty_deg,tz_deg,mean_error_deg,count\n");
  for (const auto& c : grid.cells) {
    os << fmt9(c.center_a) << ',' << fmt9(c.center_b) << ',';
    if (c.count > 0) os << fmt9(c.mean_error);
    os << ',' << c.count << '\n';  // empty cells keep an empty value field
  }
}

void write_band_summary_csv(const std::string& path, const HeatmapGrid& grid) {
  auto os = open_out(path);
  os << (grid.kind == HeatmapKind::translational ? "band_lo_cm,band_hi_cm,mean_error_cm,count\n"
                                                 : "band_lo_deg,band_hi_deg,mean_error_deg,count\n");
  for (const auto& b : grid.bands)
    os << fmt9(b.lo) << ',' << fmt9(b.hi) << ',' << fmt9(b.mean_error) << ',' << b.count << '\n';
}

void write_limb_error_table_csv(const std::string& path, const std::vector<LimbErrorRow>& rows) {
  auto os = open_out(path);
  os << "station,dy_mae_cm,dy_sd_cm,dz_mae_cm,dz_sd_cm,ty_mae_deg,ty_sd_deg,"
        "tz_mae_deg,tz_sd_deg,n\n";
  for (const auto& r : rows) {
    os << r.station;
    for (int k = 0; k < 4; ++k) os << ',' << fmt9(r.stats.mae[k]) << ',' << fmt9(r.stats.sd[k]);
    os << ',' << r.stats.n << '\n';
  }
}

void write_cross_size_csv(const std::string& path, const CrossSizeReport& report) {
  auto os = open_out(path);
  os << "radius_cm,dy_mae_cm,dz_mae_cm,ty_mae_deg,tz_mae_deg,"
        "train_radius_cm,in_dist_dy_cm,in_dist_dz_cm,in_dist_ty_deg,in_dist_tz_deg\n";
  for (const auto& e : report.entries) {
    os << fmt9(e.radius_cm);
    for (int k = 0; k < 4; ++k) os << ',' << fmt9(e.mae[k]);
    os << ',' << fmt9(report.train_radius_cm);
    for (int k = 0; k < 4; ++k) os << ',' << fmt9(report.in_dist_mae[k]);
    os << '\n';
  }
}

void write_task_table_csv(const std::string& path, const TaskSuiteResult& result) {
  auto os = open_out(path);
  os << "task,angle_deg,trials,successes,success_rate,mean_est_distance_cm,"
        "clearance_in_band_fraction\n";
  for (const auto& c : result.cells) {
    os << to_string(c.task) << ',' << fmt9(c.angle_deg) << ',' << c.trials << ','
       << c.successes << ',' << fmt9(static_cast<double>(c.successes) / c.trials) << ','
       << fmt9(c.mean_est_distance_cm) << ',' << fmt9(c.clearance_in_band_fraction) << '\n';
  }
}

void write_long_format_csv(const std::string& path, const std::vector<LongFormatRow>& rows) {
  auto os = open_out(path);
  os << "x,y,value,series\n";
  for (const auto& r : rows)
    os << fmt9(r.x) << ',' << fmt9(r.y) << ',' << fmt9(r.value) << ',' << r.series << '\n';
}

void write_manifest(const std::string& path, const Manifest& manifest) {
  auto os = open_out(path);
  os << "{\n";
  os << "  \"command\": \"" << json_escape(manifest.command) << "\",\n";
  os << "  \"seed\": " << manifest.seed << ",\n";
  os << "  \"config_hash\": \"" << json_escape(manifest.config_hash) << "\",\n";
  os << "  \"parameters\": {";
  for (std::size_t i = 0; i < manifest.parameters.size(); ++i) {
    os << (i ? ", " : "") << '"' << json_escape(manifest.parameters[i].first) << "\": \""
       << json_escape(manifest.parameters[i].second) << '"';
  }
  os << "},\n";
  os << "  \"outputs\": {";
  for (std::size_t i = 0; i < manifest.outputs.size(); ++i) {
    os << (i ? ", " : "") << '"' << json_escape(manifest.outputs[i].first) << "\": \""
       << json_escape(manifest.outputs[i].second) << '"';
  }
  os << "}\n";
  os << "}\n";
}

}  // namespace capserv
