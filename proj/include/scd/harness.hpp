// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
#ifndef SCD_HARNESS_HPP
#define SCD_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "scd/detectors.hpp"
#include "scd/streams.hpp"

namespace scd {

struct TrialResult {
  std::int64_t trial_index = 0;
  std::uint64_t seed = 0;
  bool alarmed = false;
  std::int64_t tau = 0;  // horizon when censored
  std::int64_t delay = 0;  // (tau - T)+ for alarmed trials
  std::int64_t t_hat = 0;
  double eps_hat = 0.0;
  bool censored = false;
};

struct ExperimentSpec {
  DetectorConfig detector;
  StreamSpec stream;  // template; per-trial seed = trial_seed(base_seed, i)
  std::int64_t trials = 250;
  std::uint64_t base_seed = 1;
  std::int64_t arl_truncation = 200;
  int parallelism = 1;
};

struct AggregateRow {
  std::string metric;
  std::string name;
  double value = 0.0;
};

struct ExperimentReport {
  std::vector<TrialResult> trials;
  std::vector<AggregateRow> aggregates;
  std::int64_t change_at = kNoChange;
};

TrialResult run_trial(const DetectorConfig& cfg, const StreamSpec& stream,
                      std::int64_t trial_index);

ExperimentReport run_experiment(const ExperimentSpec& spec);

std::vector<AggregateRow> compute_aggregates(
    const std::vector<TrialResult>& trials, std::int64_t change_at);

double aggregate_value(const ExperimentReport& report, const std::string& metric,
                       const std::string& name);

struct PfaEstimate {
  double fraction = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  ExperimentReport report;
};
PfaEstimate estimate_pfa(const ExperimentSpec& spec);

struct ArlEstimate {
  double truncated_mean = 0.0;
  double censored_fraction = 0.0;
  ExperimentReport report;
};
ArlEstimate estimate_arl(const ExperimentSpec& spec);

struct DelayCurveRow {
  double delta = 0.0;
  double mean_delay = 0.0;
  double sd_delay = 0.0;
  std::int64_t alarmed = 0;
  std::int64_t censored = 0;
  bool excluded = false;  // all-censored or zero mean delay; not in the fit
};
struct DelayCurve {
  std::vector<DelayCurveRow> rows;
  double loglog_slope = 0.0;
  bool slope_valid = false;
};
DelayCurve delay_curve(const DetectorConfig& cfg,
                       const std::function<StreamSpec(double)>& scenario,
                       const std::vector<double>& deltas, std::int64_t trials,
                       std::uint64_t base_seed, int parallelism = 1);

struct TProbeRow {
  std::int64_t change_at = 0;
  double fcs_mean_delay = 0.0;
  double bcs_mean_delay = 0.0;
  std::int64_t fcs_alarmed = 0;
  std::int64_t bcs_alarmed = 0;
};
std::vector<TProbeRow> t_dependence_probe(
    const DetectorConfig& cfg,
    const std::function<StreamSpec(std::int64_t)>& scenario,
    const std::vector<std::int64_t>& t_grid, std::int64_t trials,
    std::uint64_t base_seed, int parallelism = 1);

void emit_csv(const ExperimentReport& report, std::ostream& out,
              bool with_timestamp);
void emit_csv(const ExperimentReport& report, const std::string& path,
              bool with_timestamp);

}  // namespace scd

#endif
