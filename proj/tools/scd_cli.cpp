// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the library exclusively through the C API.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scd/scd.h"

using nlohmann::json;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string output_path;
  double alpha = 0.0;
  std::string family;
  std::int64_t check_frequency = 0;
  std::int64_t seed = 0;
  std::int64_t trials = 0;
  std::int64_t max_steps = 0;
  bool no_timestamp = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("--output", f.output_path, "CSV output path");
  cmd->add_option("--alpha", f.alpha, "confidence level override");
  cmd->add_option("--family", f.family, "CS family override");
  cmd->add_option("--check-frequency", f.check_frequency,
                  "backward rebuild every k steps");
  cmd->add_option("--seed", f.seed, "base seed override");
  cmd->add_option("--trials", f.trials, "trial count override");
  cmd->add_option("--max-steps", f.max_steps, "detector step limit");
  cmd->add_flag("--no-timestamp", f.no_timestamp,
                "suppress the timestamp header in CSV output");
}

json load_config(const CLI::App* cmd, const CommonFlags& f) {
  json cfg = json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw std::runtime_error("cannot open config: " + f.config_path);
    in >> cfg;
  }
  if (cmd->count("--alpha")) cfg["alpha"] = f.alpha;
  if (cmd->count("--family")) cfg["family"] = f.family;
  if (cmd->count("--check-frequency")) cfg["check_frequency"] = f.check_frequency;
  if (cmd->count("--seed")) cfg["seed"] = f.seed;
  if (cmd->count("--trials")) cfg["trials"] = f.trials;
  if (cmd->count("--max-steps")) cfg["max_steps"] = f.max_steps;
  return cfg;
}

int run_batch(const std::string& command, const CLI::App* cmd,
              const CommonFlags& f) {
  json cfg;
  try {
    cfg = load_config(cmd, f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::vector<char> summary(1 << 16);
  std::vector<char> err(1 << 12);
  const int rc = scd_run(command.c_str(), cfg.dump().c_str(),
                         f.output_path.empty() ? nullptr : f.output_path.c_str(),
                         f.no_timestamp ? 1 : 0, summary.data(), summary.size(),
                         err.data(), err.size());
  if (rc != SCD_OK) {
    std::cerr << "error: " << err.data() << "\n";
    return 1;
  }
  std::cout << summary.data() << "\n";
  return 0;
}

int run_monitor(const CLI::App* cmd, const CommonFlags& f,
                const std::string& input_path, std::int64_t heartbeat) {
  json cfg;
  try {
    cfg = load_config(cmd, f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::vector<char> err(1 << 12);
  scd_detector* det =
      scd_detector_create(cfg.dump().c_str(), err.data(), err.size());
  if (!det) {
    std::cerr << "error: " << err.data() << "\n";
    return 1;
  }
  std::ifstream file;
  std::istream* in = &std::cin;
  if (!input_path.empty() && input_path != "-") {
    file.open(input_path);
    if (!file) {
      std::cerr << "error: cannot open input: " << input_path << "\n";
      scd_detector_destroy(det);
      return 1;
    }
    in = &file;
  }
  std::string line;
  std::size_t line_no = 0;
  int exit_code = 0;
  std::vector<double> u(4096), v(4096);
  while (std::getline(*in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    int is_pair = 0;
    double x = 0.0;
    std::size_t dim = 0;
    if (scd_parse_line(line.c_str(), line_no, &is_pair, &x, u.data(), v.data(),
                       u.size(), &dim, err.data(), err.size()) != SCD_OK) {
      std::cerr << "error: " << err.data() << "\n";
      exit_code = 1;
      break;
    }
    const int rc = is_pair
                       ? scd_detector_step_pair(det, u.data(), v.data(), dim,
                                                err.data(), err.size())
                       : scd_detector_step_scalar(det, x, err.data(), err.size());
    if (rc == SCD_ERROR) {
      std::cerr << "error: line " << line_no << ": " << err.data() << "\n";
      exit_code = 1;
      break;
    }
    if (rc == SCD_ALARM) {
      std::vector<char> report(1 << 12);
      scd_detector_report_json(det, report.data(), report.size(), err.data(),
                               err.size());
      std::cout << report.data() << "\n";
      exit_code = 2;
      break;
    }
    if (heartbeat > 0 && scd_detector_step_count(det) % heartbeat == 0) {
      std::cout << "{\"event\":\"progress\",\"n\":" << scd_detector_step_count(det)
                << "}\n";
    }
  }
  scd_detector_destroy(det);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scd: streaming changepoint detection via confidence sequences"};
  app.require_subcommand(1);

  const std::vector<std::string> batch_commands = {
      "simulate", "arl", "pfa", "delay-curve", "t-probe", "certificate"};
  std::vector<CommonFlags> flags(batch_commands.size() + 1);
  std::vector<CLI::App*> cmds;
  for (std::size_t i = 0; i < batch_commands.size(); ++i) {
    CLI::App* c = app.add_subcommand(batch_commands[i]);
    add_common(c, flags[i]);
    cmds.push_back(c);
  }

  CommonFlags& mf = flags.back();
  std::string input_path;
  std::int64_t heartbeat = 0;
  CLI::App* monitor = app.add_subcommand("monitor", "watch a live stream");
  add_common(monitor, mf);
  monitor->add_option("--input", input_path, "input file ('-' for stdin)");
  monitor->add_option("--heartbeat", heartbeat, "progress event every N steps");

  CLI11_PARSE(app, argc, argv);

  if (monitor->parsed()) return run_monitor(monitor, mf, input_path, heartbeat);
  for (std::size_t i = 0; i < batch_commands.size(); ++i)
    if (cmds[i]->parsed()) return run_batch(batch_commands[i], cmds[i], flags[i]);
  return 1;
}
