// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "scd/scd.h"

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("version string") {
  REQUIRE(scd_version() != nullptr);
  CHECK(std::string(scd_version()).rfind("scd ", 0) == 0);
}

TEST_CASE("detector creation validates json and schema") {
  char err[256] = {0};
  scd_detector* d = scd_detector_create(R"({"alpha":0.05})", err, sizeof err);
  REQUIRE(d != nullptr);
  CHECK(scd_detector_step_count(d) == 0);
  scd_detector_destroy(d);

  CHECK(scd_detector_create("{not json", err, sizeof err) == nullptr);
  CHECK(err[0] != '\0');

  err[0] = '\0';
  CHECK(scd_detector_create(R"({"alpha":"high","trials":1})", err, sizeof err) ==
        nullptr);
  CHECK(std::string(err).find("invalid config fields") != std::string::npos);
  CHECK(std::string(err).find("alpha") != std::string::npos);

  err[0] = '\0';
  CHECK(scd_detector_create(R"({"alpha":2.0,"check_frequency":0})", err,
                            sizeof err) == nullptr);
  const std::string msg(err);
  CHECK(msg.find("alpha") != std::string::npos);
  CHECK(msg.find("check_frequency") != std::string::npos);

  err[0] = '\0';
  CHECK(scd_detector_create(R"({"family":"unknown_family"})", err, sizeof err) ==
        nullptr);
  CHECK(std::string(err).find("family") != std::string::npos);
}

TEST_CASE("scalar stepping to an alarm and the json report") {
  char err[256] = {0};
  scd_detector* d = scd_detector_create(
      R"({"alpha":0.05,"family":"gaussian_mean","detector":"bcs"})", err,
      sizeof err);
  REQUIRE(d != nullptr);

  char out[256] = {0};
  // no report before any alarm
  CHECK(scd_detector_report_json(d, out, sizeof out, err, sizeof err) ==
        SCD_ERROR);

  std::mt19937_64 rng(404);
  std::normal_distribution<double> g(0.0, 1.0);
  int rc = SCD_OK;
  long long tau = 0;
  for (int t = 1; t <= 600 && rc == SCD_OK; ++t) {
    const double x = g(rng) + (t > 100 ? 2.0 : 0.0);
    rc = scd_detector_step_scalar(d, x, err, sizeof err);
    if (rc == SCD_ALARM) tau = scd_detector_step_count(d);
  }
  REQUIRE(rc == SCD_ALARM);
  CHECK(tau > 100);

  REQUIRE(scd_detector_report_json(d, out, sizeof out, err, sizeof err) ==
          SCD_OK);
  const json rep = json::parse(out);
  CHECK(rep["event"] == "alarm");
  CHECK(rep["tau"].get<long long>() == tau);
  CHECK(rep["t_hat"].get<long long>() > 0);
  CHECK(rep["eps_hat"].get<double>() > 0.0);

  // stepping a stopped detector is an error, not UB
  CHECK(scd_detector_step_scalar(d, 0.0, err, sizeof err) == SCD_ERROR);
  CHECK(std::string(err).find("stopped") != std::string::npos);
  scd_detector_destroy(d);
  scd_detector_destroy(nullptr);  // harmless
}

TEST_CASE("pair stepping dispatches to the mmd detector") {
  char err[256] = {0};
  scd_detector* d = scd_detector_create(
      R"({"alpha":0.05,"family":"mmd_pair","mmd_bandwidth":1.0})", err,
      sizeof err);
  REQUIRE(d != nullptr);
  const double u[2] = {0.0, 1.0};
  const double v[2] = {0.5, 0.5};
  CHECK(scd_detector_step_pair(d, u, v, 2, err, sizeof err) == SCD_OK);
  CHECK(scd_detector_step_count(d) == 1);
  // scalar observation on a pair detector is an error
  CHECK(scd_detector_step_scalar(d, 1.0, err, sizeof err) == SCD_ERROR);
  scd_detector_destroy(d);
}

TEST_CASE("line parsing through the c api") {
  char err[256] = {0};
  int is_pair = -1;
  double x = 0.0, u[8], v[8];
  size_t dim = 99;
  CHECK(scd_parse_line("2.5", 1, &is_pair, &x, u, v, 8, &dim, err, sizeof err) ==
        SCD_OK);
  CHECK(is_pair == 0);
  CHECK(x == 2.5);
  CHECK(dim == 0);

  CHECK(scd_parse_line("1,2|3,4", 2, &is_pair, &x, u, v, 8, &dim, err,
                       sizeof err) == SCD_OK);
  CHECK(is_pair == 1);
  CHECK(dim == 2);
  CHECK(u[0] == 1.0);
  CHECK(v[1] == 4.0);

  CHECK(scd_parse_line("bogus", 7, &is_pair, &x, u, v, 8, &dim, err,
                       sizeof err) == SCD_ERROR);
  CHECK(std::string(err).find("line 7") != std::string::npos);

  err[0] = '\0';
  CHECK(scd_parse_line("1,2,3|4,5,6", 9, &is_pair, &x, u, v, 2, &dim, err,
                       sizeof err) == SCD_ERROR);  // buffer too small
  CHECK(err[0] != '\0');
}

TEST_CASE("batch simulate writes stable csv and a summary") {
  const char* cfg = R"({
    "alpha": 0.05, "family": "gaussian_mean", "detector": "bcs",
    "trials": 8, "seed": 21,
    "stream": {"family": "gaussian_mean", "theta0": 0.0, "theta1": 2.0,
               "change_at": 40, "horizon": 250}
  })";
  char summary[4096] = {0};
  char err[256] = {0};
  const std::string path_a = "capi_sim_a.csv";
  const std::string path_b = "capi_sim_b.csv";
  REQUIRE(scd_run("simulate", cfg, path_a.c_str(), 1, summary, sizeof summary,
                  err, sizeof err) == SCD_OK);
  REQUIRE(scd_run("simulate", cfg, path_b.c_str(), 1, summary, sizeof summary,
                  err, sizeof err) == SCD_OK);
  CHECK(slurp(path_a) == slurp(path_b));  // byte-identical without timestamps
  CHECK(slurp(path_a).rfind("# scd-report v1\n", 0) == 0);

  const json s = json::parse(summary);
  CHECK(s["command"] == "simulate");
  CHECK(s["trials"] == 8);
  CHECK(s["aggregates"]["alarm.fraction"].get<double>() > 0.5);
  CHECK(s["aggregates"]["delay.mean"].get<double>() > 0.0);
  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
}

TEST_CASE("batch pfa and arl summaries") {
  const char* cfg = R"({
    "alpha": 0.05, "detector": "fcs", "trials": 20, "seed": 3,
    "stream": {"family": "gaussian_mean", "horizon": 300}
  })";
  char summary[2048] = {0};
  char err[256] = {0};
  REQUIRE(scd_run("pfa", cfg, nullptr, 1, summary, sizeof summary, err,
                  sizeof err) == SCD_OK);
  json s = json::parse(summary);
  CHECK(s["command"] == "pfa");
  CHECK(s["fraction"].get<double>() <= 0.2);
  CHECK(s["ci_upper"].get<double>() >= s["fraction"].get<double>());

  const char* arl_cfg = R"({
    "alpha": 0.05, "detector": "bcs", "trials": 20, "seed": 3,
    "arl_truncation": 100,
    "stream": {"family": "gaussian_mean", "horizon": 100}
  })";
  REQUIRE(scd_run("arl", arl_cfg, nullptr, 1, summary, sizeof summary, err,
                  sizeof err) == SCD_OK);
  s = json::parse(summary);
  CHECK(s["command"] == "arl");
  CHECK(s["truncated_mean"].get<double>() <= 100.0);
  CHECK(s["bound"].get<double>() == doctest::Approx(1.0 / 0.1 - 1.5));
}

TEST_CASE("batch certificate matches the library solver") {
  const char* cfg = R"({
    "alpha": 0.05, "delta": 2.0, "change_at": 100, "family": "gaussian_mean"
  })";
  char summary[2048] = {0};
  char err[256] = {0};
  REQUIRE(scd_run("certificate", cfg, nullptr, 1, summary, sizeof summary, err,
                  sizeof err) == SCD_OK);
  json s = json::parse(summary);
  CHECK(s["command"] == "certificate");
  CHECK(s["kind"] == "u0");
  CHECK(s["u0"] == 43);
  CHECK(s["reachable"] == true);
  CHECK(s["fcs_delay"].is_number());

  // known pre-change parameter: t0 variant, never larger than u0
  const char* known = R"({
    "alpha": 0.05, "delta": 2.0, "change_at": 100, "family": "gaussian_mean",
    "known_theta0": true
  })";
  REQUIRE(scd_run("certificate", known, nullptr, 1, summary, sizeof summary,
                  err, sizeof err) == SCD_OK);
  s = json::parse(summary);
  CHECK(s["kind"] == "t0");
  CHECK(s["u0"].get<long long>() <= 43);

  // undetectable gap reports unreachable instead of failing
  const char* tiny = R"({
    "alpha": 0.05, "delta": 1e-9, "change_at": 100, "family": "gaussian_mean"
  })";
  REQUIRE(scd_run("certificate", tiny, nullptr, 1, summary, sizeof summary, err,
                  sizeof err) == SCD_OK);
  s = json::parse(summary);
  CHECK(s["reachable"] == false);
  CHECK(s["u0"].is_null());

  // bounded_mean needs an explicit width proxy
  const char* bounded = R"({
    "alpha": 0.05, "delta": 0.3, "change_at": 100, "family": "bounded_mean"
  })";
  CHECK(scd_run("certificate", bounded, nullptr, 1, summary, sizeof summary,
                err, sizeof err) == SCD_ERROR);
  CHECK(std::string(err).find("width_proxy") != std::string::npos);
}

TEST_CASE("batch delay curve over a delta grid") {
  const char* cfg = R"({
    "alpha": 0.05, "detector": "bcs", "trials": 10, "seed": 5,
    "delta_grid": [0.8, 1.6],
    "stream": {"family": "gaussian_mean", "theta0": 0.0,
               "change_at": 30, "horizon": 500}
  })";
  char summary[4096] = {0};
  char err[256] = {0};
  const std::string path = "capi_curve.csv";
  REQUIRE(scd_run("delay-curve", cfg, path.c_str(), 1, summary, sizeof summary,
                  err, sizeof err) == SCD_OK);
  const json s = json::parse(summary);
  CHECK(s["command"] == "delay-curve");
  REQUIRE(s["rows"].size() == 2);
  CHECK(s["rows"][0]["mean_delay"].get<double>() >
        s["rows"][1]["mean_delay"].get<double>());
  CHECK(s["slope"].get<double>() < 0.0);
  const std::string csv = slurp(path);
  CHECK(csv.find("delta,mean_delay,sd_delay,alarmed,censored,excluded") !=
        std::string::npos);
  std::remove(path.c_str());

  // a missing grid is a schema error naming the field
  const char* no_grid = R"({
    "trials": 2, "stream": {"family": "gaussian_mean", "horizon": 10}
  })";
  CHECK(scd_run("delay-curve", no_grid, nullptr, 1, summary, sizeof summary,
                err, sizeof err) == SCD_ERROR);
  CHECK(std::string(err).find("delta_grid") != std::string::npos);
}

TEST_CASE("batch change-time probe") {
  const char* cfg = R"({
    "alpha": 0.05, "known_theta0": 0.0, "trials": 8, "seed": 13,
    "t_grid": [40, 120], "post_horizon": 400,
    "stream": {"family": "gaussian_mean", "theta0": 0.0, "theta1": 2.0,
               "horizon": 1}
  })";
  char summary[4096] = {0};
  char err[256] = {0};
  REQUIRE(scd_run("t-probe", cfg, nullptr, 1, summary, sizeof summary, err,
                  sizeof err) == SCD_OK);
  const json s = json::parse(summary);
  CHECK(s["command"] == "t-probe");
  REQUIRE(s["rows"].size() == 2);
  CHECK(s["rows"][0]["change_at"] == 40);
  CHECK(s["rows"][0]["bcs_mean_delay"].get<double>() > 0.0);
  CHECK(s["rows"][0]["fcs_mean_delay"].get<double>() > 0.0);
}

TEST_CASE("unknown command and malformed config are errors") {
  char summary[256] = {0};
  char err[256] = {0};
  CHECK(scd_run("frobnicate", "{}", nullptr, 1, summary, sizeof summary, err,
                sizeof err) == SCD_ERROR);
  CHECK(std::string(err).find("unknown command") != std::string::npos);
  CHECK(scd_run("simulate", "{oops", nullptr, 1, summary, sizeof summary, err,
                sizeof err) == SCD_ERROR);
  CHECK(scd_run("simulate", "{}", nullptr, 1, summary, sizeof summary, err,
                sizeof err) == SCD_ERROR);  // missing stream object
  CHECK(std::string(err).find("stream") != std::string::npos);
}
