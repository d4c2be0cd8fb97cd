#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace {

using capserv::cli::RunConfig;

// Shared flags: config file, dotted-path overrides, and the common knobs.
struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--set", args.overrides,
                  "config override, dotted path (e.g. train.epochs=5)");
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [&args](std::uint64_t v) {
        args.seed = v;
        args.seed_set = true;
      },
      "master seed");
}

RunConfig resolve(const CommonArgs& args, const std::string& default_subdir) {
  RunConfig cfg = capserv::cli::load_config(args.config_path, args.overrides);
  if (args.seed_set) cfg.master_seed = args.seed;
  if (!args.out_dir.empty()) {
    cfg.out_dir = args.out_dir;
  } else if (cfg.out_dir.empty()) {
    const char* root = std::getenv("CAPSERV_OUT_ROOT");
    cfg.out_dir = (std::filesystem::path(root ? root : "capserv_out") / default_subdir).string();
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capserv: capacitive limb-servoing simulator"};
  app.require_subcommand(1);

  CommonArgs collect_args, train_args, servo_args, report_args, reproduce_args;
  std::string dataset_path, servo_model, report_model;
  bool stub = false, strict = false;
  std::string servo_task;
  double servo_angle = -1.0;

  auto* collect = app.add_subcommand("collect", "generate a labeled capacitance dataset");
  add_common(collect, collect_args);

  auto* train = app.add_subcommand("train", "train the pose estimator on a dataset");
  add_common(train, train_args);
  train->add_option("--dataset", dataset_path, "dataset csv produced by collect")->required();

  auto* servo = app.add_subcommand("servo", "run one closed-loop traversal");
  add_common(servo, servo_args);
  servo->add_option("--model", servo_model, "trained model file");
  servo->add_flag("--stub-estimator", stub, "use the true-pose stub instead of a model");
  servo->add_flag("--strict", strict, "exit 4 unless the run succeeds");
  servo->add_option("--task", servo_task, "bent_elbow|forearm_tilt|bent_knee|moving_limb");
  servo->add_option("--angle", servo_angle, "joint angle in degrees");

  auto* report = app.add_subcommand("report", "evaluation tables, grids and task suite");
  add_common(report, report_args);
  report->add_option("--model", report_model, "trained model file");

  auto* reproduce =
      app.add_subcommand("reproduce", "collect, train, servo and report in one pass");
  add_common(reproduce, reproduce_args);

  CLI11_PARSE(app, argc, argv);

  return capserv::cli::run_guarded([&]() -> int {
    if (collect->parsed()) return capserv::cli::cmd_collect(resolve(collect_args, "collect"));
    if (train->parsed())
      return capserv::cli::cmd_train(resolve(train_args, "train"), dataset_path);
    if (servo->parsed()) {
      RunConfig cfg = resolve(servo_args, "servo");
      if (stub) cfg.stub_estimator = true;
      if (strict) cfg.strict = true;
      if (!servo_task.empty()) cfg.servo_task = servo_task;
      if (servo_angle >= 0.0) cfg.servo_angle_deg = servo_angle;
      return capserv::cli::cmd_servo(cfg, servo_model);
    }
    if (report->parsed())
      return capserv::cli::cmd_report(resolve(report_args, "report"), report_model);
    if (reproduce->parsed())
      return capserv::cli::cmd_reproduce(resolve(reproduce_args, "reproduce"));
    return capserv::cli::kExitConfig;
  });
}
