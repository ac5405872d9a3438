// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "scd/harness.hpp"

using namespace scd;

namespace {

ExperimentSpec shift_spec() {
  ExperimentSpec spec;
  spec.detector.alpha = 0.05;
  spec.stream.theta0 = 0.0;
  spec.stream.theta1 = 2.0;
  spec.stream.change_at = 50;
  spec.stream.horizon = 300;
  spec.trials = 20;
  spec.base_seed = 42;
  return spec;
}

}  // namespace

TEST_CASE("single trial is deterministic and reports delay") {
  ExperimentSpec spec = shift_spec();
  StreamSpec stream = spec.stream;
  stream.seed = trial_seed(spec.base_seed, 0);
  const TrialResult a = run_trial(spec.detector, stream, 0);
  const TrialResult b = run_trial(spec.detector, stream, 0);
  CHECK(a.alarmed);
  CHECK(a.tau == b.tau);
  CHECK(a.t_hat == b.t_hat);
  CHECK(a.eps_hat == b.eps_hat);
  CHECK(a.delay == a.tau - 50);
  CHECK(!a.censored);
}

TEST_CASE("experiment rows are identical under parallel scheduling") {
  ExperimentSpec serial = shift_spec();
  serial.parallelism = 1;
  ExperimentSpec parallel = shift_spec();
  parallel.parallelism = 3;
  const ExperimentReport a = run_experiment(serial);
  const ExperimentReport b = run_experiment(parallel);
  REQUIRE(a.trials.size() == b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].seed == b.trials[i].seed);
    CHECK(a.trials[i].tau == b.trials[i].tau);
    CHECK(a.trials[i].t_hat == b.trials[i].t_hat);
    const double ea = a.trials[i].eps_hat, eb = b.trials[i].eps_hat;
    CHECK((ea == eb || (std::isnan(ea) && std::isnan(eb))));
  }
}

TEST_CASE("null stream trials are censored at the horizon") {
  ExperimentSpec spec = shift_spec();
  spec.stream.change_at = kNoChange;
  spec.stream.horizon = 150;
  spec.trials = 10;
  const ExperimentReport rep = run_experiment(spec);
  int censored = 0;
  for (const TrialResult& t : rep.trials)
    if (t.censored) {
      ++censored;
      CHECK(t.tau == 150);
      CHECK(!t.alarmed);
    }
  CHECK(censored >= 9);  // false alarms at alpha=0.05 over 150 steps are rare
  CHECK(aggregate_value(rep, "censored", "fraction") ==
        doctest::Approx(censored / 10.0));
}

TEST_CASE("aggregates summarize hand-built trials") {
  std::vector<TrialResult> trials(3);
  trials[0].alarmed = true;
  trials[0].tau = 60;
  trials[0].delay = 10;
  trials[0].t_hat = 52;
  trials[0].eps_hat = 0.31;
  trials[1].alarmed = true;
  trials[1].tau = 70;
  trials[1].delay = 20;
  trials[1].t_hat = 48;
  trials[1].eps_hat = 0.35;
  trials[2].censored = true;
  trials[2].tau = 100;

  const auto rows = compute_aggregates(trials, 50);
  ExperimentReport rep;
  rep.aggregates = rows;
  CHECK(aggregate_value(rep, "alarm", "fraction") == doctest::Approx(2.0 / 3.0));
  CHECK(aggregate_value(rep, "delay", "mean") == doctest::Approx(15.0));
  CHECK(aggregate_value(rep, "delay", "median") == doctest::Approx(15.0));
  CHECK(aggregate_value(rep, "tau", "truncated_mean") ==
        doctest::Approx((60.0 + 70.0 + 100.0) / 3.0));
  CHECK(aggregate_value(rep, "t_hat", "median_abs_error") ==
        doctest::Approx(2.0));
  // eps_hat mode uses 0.1-wide bins centered on the bin midpoint
  CHECK(aggregate_value(rep, "eps_hat", "mode") == doctest::Approx(0.35));
  CHECK_THROWS(aggregate_value(rep, "nope", "mean"));
}

TEST_CASE("false alarm estimation needs a null stream") {
  ExperimentSpec spec = shift_spec();
  CHECK_THROWS(estimate_pfa(spec));
  spec.stream.change_at = kNoChange;
  spec.stream.horizon = 200;
  spec.trials = 30;
  const PfaEstimate est = estimate_pfa(spec);
  CHECK(est.fraction >= 0.0);
  CHECK(est.fraction <= 0.2);
  CHECK(est.ci_lower <= est.fraction);
  CHECK(est.ci_upper >= est.fraction);
}

TEST_CASE("average run length honors its truncation") {
  ExperimentSpec spec = shift_spec();
  spec.stream.change_at = kNoChange;
  spec.trials = 30;
  spec.arl_truncation = 120;
  const ArlEstimate est = estimate_arl(spec);
  CHECK(est.truncated_mean > 10.0);
  CHECK(est.truncated_mean <= 120.0);
  CHECK(est.censored_fraction >= 0.5);  // most null runs survive 120 steps
  spec.arl_truncation = 0;
  CHECK_THROWS(estimate_arl(spec));
}

TEST_CASE("delay curve slopes downward and excludes empty rows") {
  DetectorConfig cfg;
  cfg.alpha = 0.05;
  auto scenario = [](double delta) {
    StreamSpec s;
    s.theta0 = 0.0;
    s.theta1 = delta;
    s.change_at = 30;
    s.horizon = 800;
    return s;
  };
  const DelayCurve curve =
      delay_curve(cfg, scenario, {0.6, 1.2, 2.4}, 25, 7);
  REQUIRE(curve.rows.size() == 3);
  CHECK(curve.slope_valid);
  CHECK(curve.loglog_slope < 0.0);
  for (std::size_t i = 1; i < curve.rows.size(); ++i)
    CHECK(curve.rows[i].mean_delay < curve.rows[i - 1].mean_delay);
  CHECK_THROWS(delay_curve(cfg, scenario, {}, 25, 7));

  // an undetectable point is excluded from the fit but keeps its row
  const DelayCurve with_null =
      delay_curve(cfg, [](double) {
        StreamSpec s;
        s.change_at = 30;
        s.horizon = 60;  // change never detectable: theta1 == theta0
        return s;
      }, {0.5}, 5, 7);
  CHECK(with_null.rows[0].excluded);
  CHECK(!with_null.slope_valid);
}

TEST_CASE("change-time probe runs both detector kinds on paired seeds") {
  DetectorConfig cfg;
  cfg.alpha = 0.05;
  cfg.known_theta0 = 0.0;
  auto scenario = [](std::int64_t T) {
    StreamSpec s;
    s.theta0 = 0.0;
    s.theta1 = 1.5;
    s.change_at = T;
    s.horizon = T + 500;
    return s;
  };
  const auto rows = t_dependence_probe(cfg, scenario, {50, 150}, 15, 11);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.fcs_alarmed > 0);
    CHECK(row.bcs_alarmed > 0);
    CHECK(row.fcs_mean_delay > 0.0);
    CHECK(row.bcs_mean_delay > 0.0);
  }
}

TEST_CASE("csv reports are stable without the timestamp line") {
  ExperimentSpec spec = shift_spec();
  spec.trials = 5;
  const ExperimentReport rep = run_experiment(spec);
  std::ostringstream a, b;
  emit_csv(rep, a, false);
  emit_csv(rep, b, false);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("# scd-report v1\n", 0) == 0);
  CHECK(a.str().find("trial_index,seed,alarmed,tau,delay,t_hat,eps_hat,censored") !=
        std::string::npos);
  CHECK(a.str().find("metric,name,value") != std::string::npos);

  std::ostringstream ts;
  emit_csv(rep, ts, true);
  CHECK(ts.str().find("# generated ") != std::string::npos);
  CHECK_THROWS(emit_csv(rep, "/nonexistent-dir/report.csv", false));
}

TEST_CASE("experiments validate their inputs") {
  ExperimentSpec spec = shift_spec();
  spec.trials = 0;
  CHECK_THROWS(run_experiment(spec));
}
