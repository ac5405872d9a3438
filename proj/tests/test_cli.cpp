// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks against the installed binary. The binary path arrives as
// the first program argument (wired up by the build).
#define DOCTEST_CONFIG_IMPLEMENT
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

std::string g_binary;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  const std::string out_path = "cli_stdout.tmp";
  const std::string err_path = "cli_stderr.tmp";
  const std::string cmd =
      g_binary + " " + args + " >" + out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = (status >= 0) ? WEXITSTATUS(status) : -1;
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::string slurp_file(const std::string& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string shifted_stream_file(const std::string& path, int pre, int post,
                                double shift) {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> g(0.0, 1.0);
  std::ostringstream os;
  for (int t = 0; t < pre; ++t) os << g(rng) << "\n";
  for (int t = 0; t < post; ++t) os << g(rng) + shift << "\n";
  write_file(path, os.str());
  return path;
}

}  // namespace

TEST_CASE("monitor exits 0 on a quiet stream") {
  shifted_stream_file("cli_null.txt", 200, 0, 0.0);
  const RunResult r = run_cli("monitor --input cli_null.txt");
  CHECK(r.exit_code == 0);
  CHECK(r.out.empty());
  std::remove("cli_null.txt");
}

TEST_CASE("monitor exits 2 and prints the alarm report on a shift") {
  shifted_stream_file("cli_shift.txt", 100, 400, 2.5);
  const RunResult r = run_cli("monitor --input cli_shift.txt --alpha 0.05");
  CHECK(r.exit_code == 2);
  REQUIRE(!r.out.empty());
  const json rep = json::parse(r.out);
  CHECK(rep["event"] == "alarm");
  CHECK(rep["tau"].get<long long>() > 100);
  CHECK(rep["t_hat"].get<long long>() > 0);
  std::remove("cli_shift.txt");
}

TEST_CASE("monitor exits 1 on a malformed line, citing it") {
  write_file("cli_bad.txt", "1.0\n2.0\nnot-a-number\n");
  const RunResult r = run_cli("monitor --input cli_bad.txt");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("line 3") != std::string::npos);
  std::remove("cli_bad.txt");
}

TEST_CASE("monitor reads pairs and emits heartbeats") {
  std::ostringstream os;
  for (int t = 0; t < 10; ++t) os << "0.1,0.2|0.3,0.4\n";
  write_file("cli_pairs.txt", os.str());
  const RunResult r = run_cli(
      "monitor --input cli_pairs.txt --family mmd_pair --heartbeat 5");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"event\":\"progress\"") != std::string::npos);
  std::remove("cli_pairs.txt");
}

TEST_CASE("monitor rejects a bad config") {
  const RunResult r = run_cli("monitor --input - --alpha 7 </dev/null");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("alpha") != std::string::npos);
}

TEST_CASE("certificate prints a summary on stdout") {
  write_file("cli_cert.json",
             R"({"alpha":0.05,"delta":2.0,"change_at":100,"family":"gaussian_mean"})");
  const RunResult r = run_cli("certificate --config cli_cert.json");
  CHECK(r.exit_code == 0);
  const json s = json::parse(r.out);
  CHECK(s["u0"] == 43);
  CHECK(s["reachable"] == true);
  std::remove("cli_cert.json");
}

TEST_CASE("simulate writes byte-identical csv without timestamps") {
  write_file("cli_sim.json", R"({
    "alpha": 0.05, "family": "gaussian_mean", "trials": 6, "seed": 17,
    "stream": {"family": "gaussian_mean", "theta0": 0.0, "theta1": 2.0,
               "change_at": 40, "horizon": 250}
  })");
  const RunResult a = run_cli(
      "simulate --config cli_sim.json --output cli_a.csv --no-timestamp");
  const RunResult b = run_cli(
      "simulate --config cli_sim.json --output cli_b.csv --no-timestamp");
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  const std::string csv_a = slurp_file("cli_a.csv");
  CHECK(csv_a == slurp_file("cli_b.csv"));
  CHECK(csv_a.rfind("# scd-report v1\n", 0) == 0);
  CHECK(csv_a.find("# generated") == std::string::npos);
  const json s = json::parse(a.out);
  CHECK(s["command"] == "simulate");

  // flag overrides beat the config file: fewer trials, fewer rows
  const RunResult c = run_cli(
      "simulate --config cli_sim.json --output cli_c.csv --no-timestamp "
      "--trials 2");
  CHECK(c.exit_code == 0);
  CHECK(json::parse(c.out)["trials"] == 2);
  std::remove("cli_sim.json");
  std::remove("cli_a.csv");
  std::remove("cli_b.csv");
  std::remove("cli_c.csv");
}

TEST_CASE("batch errors exit 1 with a message") {
  const RunResult missing = run_cli("simulate --config does_not_exist.json");
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("cannot open config") != std::string::npos);

  write_file("cli_empty.json", "{}");
  const RunResult bad = run_cli("simulate --config cli_empty.json");
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("stream") != std::string::npos);
  std::remove("cli_empty.json");

  const RunResult unknown = run_cli("no-such-subcommand");
  CHECK(unknown.exit_code != 0);
}

int main(int argc, char** argv) {
  if (argc > 1 && argv[1][0] != '-') {
    g_binary = argv[1];
    --argc;
    ++argv;
  }
  if (g_binary.empty()) {
    std::fprintf(stderr, "usage: test_cli <path-to-binary> [doctest args]\n");
    return 1;
  }
  doctest::Context ctx;
  ctx.applyCommandLine(argc, argv);
  return ctx.run();
}
