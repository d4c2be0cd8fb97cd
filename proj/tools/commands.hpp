#pragma once

#include <string>

#include "config.hpp"

namespace capserv::cli {

int cmd_collect(const RunConfig& cfg);
int cmd_train(const RunConfig& cfg, const std::string& dataset_path);
int cmd_servo(const RunConfig& cfg, const std::string& model_path);
int cmd_report(const RunConfig& cfg, const std::string& model_path);
int cmd_reproduce(const RunConfig& cfg);

/// Maps exceptions thrown by commands onto the documented exit codes.
int run_guarded(const std::function<int()>& body);

}  // namespace capserv::cli
