// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
#include "scd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace scd {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? kNaN : s / static_cast<double>(xs.size());
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return kNaN;
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return (xs.size() % 2) ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

double sd_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

// histogram mode with fixed 0.1 bins; returns the bin center
double mode_of(const std::vector<double>& xs) {
  if (xs.empty()) return kNaN;
  std::vector<int> counts;
  for (double x : xs) {
    if (!std::isfinite(x) || x < 0.0) continue;
    const std::size_t bin = static_cast<std::size_t>(x / 0.1);
    if (bin >= counts.size()) counts.resize(bin + 1, 0);
    ++counts[bin];
  }
  if (counts.empty()) return kNaN;
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i)
    if (counts[i] > counts[best]) best = i;
  return 0.1 * (static_cast<double>(best) + 0.5);
}

}  // namespace

TrialResult run_trial(const DetectorConfig& cfg, const StreamSpec& stream,
                      std::int64_t trial_index) {
  TrialResult r;
  r.trial_index = trial_index;
  r.seed = stream.seed;
  r.eps_hat = kNaN;
  auto detector = make_detector(cfg);
  const std::vector<Observation> obs = generate(stream);
  for (const Observation& o : obs) {
    if (detector->step(o) == StepStatus::alarmed) {
      r.alarmed = true;
      break;
    }
  }
  r.tau = detector->n();
  if (r.alarmed) {
    const AlarmReport& rep = detector->report();
    r.t_hat = rep.t_hat;
    r.eps_hat = rep.eps_hat;
    if (stream.change_at != kNoChange)
      r.delay = std::max<std::int64_t>(0, r.tau - stream.change_at);
  } else {
    r.censored = true;
  }
  return r;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
  ExperimentReport report;
  report.change_at = spec.stream.change_at;
  report.trials.resize(spec.trials);
  const int workers = std::max(1, spec.parallelism);
  auto work = [&](int w) {
    for (std::int64_t i = w; i < spec.trials; i += workers) {
      StreamSpec stream = spec.stream;
      stream.seed = trial_seed(spec.base_seed, static_cast<std::uint64_t>(i));
      if (stream.family == StreamFamily::paired_mvn && stream.cov_seed == 0)
        stream.cov_seed = splitmix64(spec.base_seed);
      report.trials[i] = run_trial(spec.detector, stream, i);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  report.aggregates = compute_aggregates(report.trials, report.change_at);
  return report;
}

std::vector<AggregateRow> compute_aggregates(
    const std::vector<TrialResult>& trials, std::int64_t change_at) {
  std::vector<AggregateRow> out;
  const double n = static_cast<double>(trials.size());
  std::int64_t alarmed = 0;
  std::vector<double> delays, taus, t_hats, eps_hats, t_hat_errs;
  for (const TrialResult& t : trials) {
    taus.push_back(static_cast<double>(t.tau));
    if (!t.alarmed) continue;
    ++alarmed;
    t_hats.push_back(static_cast<double>(t.t_hat));
    if (std::isfinite(t.eps_hat)) eps_hats.push_back(t.eps_hat);
    if (change_at != kNoChange) {
      delays.push_back(static_cast<double>(t.delay));
      t_hat_errs.push_back(std::abs(static_cast<double>(t.t_hat - change_at)));
    }
  }
  const double alarm_frac = n > 0 ? alarmed / n : kNaN;
  out.push_back({"alarm", "fraction", alarm_frac});
  out.push_back({"censored", "fraction", n > 0 ? 1.0 - alarm_frac : kNaN});
  out.push_back({"tau", "truncated_mean", mean_of(taus)});
  if (!delays.empty()) {
    out.push_back({"delay", "mean", mean_of(delays)});
    out.push_back({"delay", "median", median_of(delays)});
    out.push_back({"delay", "sd", sd_of(delays)});
  }
  if (!t_hats.empty()) {
    out.push_back({"t_hat", "median", median_of(t_hats)});
    if (!t_hat_errs.empty())
      out.push_back({"t_hat", "median_abs_error", median_of(t_hat_errs)});
  }
  if (!eps_hats.empty()) {
    out.push_back({"eps_hat", "median", median_of(eps_hats)});
    out.push_back({"eps_hat", "mode", mode_of(eps_hats)});
  }
  return out;
}

double aggregate_value(const ExperimentReport& report, const std::string& metric,
                       const std::string& name) {
  for (const AggregateRow& row : report.aggregates)
    if (row.metric == metric && row.name == name) return row.value;
  throw std::out_of_range("aggregate not found: " + metric + "/" + name);
}

PfaEstimate estimate_pfa(const ExperimentSpec& spec) {
  if (spec.stream.change_at != kNoChange)
    throw std::invalid_argument("PFA estimation needs a null stream");
  PfaEstimate est;
  est.report = run_experiment(spec);
  const double n = static_cast<double>(spec.trials);
  est.fraction = aggregate_value(est.report, "alarm", "fraction");
  const double se = std::sqrt(std::max(est.fraction * (1.0 - est.fraction), 0.0) / n);
  est.ci_lower = std::max(0.0, est.fraction - 1.96 * se);
  est.ci_upper = std::min(1.0, est.fraction + 1.96 * se);
  return est;
}

ArlEstimate estimate_arl(const ExperimentSpec& spec) {
  if (spec.stream.change_at != kNoChange)
    throw std::invalid_argument("ARL estimation needs a null stream");
  if (spec.arl_truncation < 1) throw std::invalid_argument("truncation must be >= 1");
  ExperimentSpec trunc = spec;
  trunc.stream.horizon = spec.arl_truncation;
  ArlEstimate est;
  est.report = run_experiment(trunc);
  est.truncated_mean = aggregate_value(est.report, "tau", "truncated_mean");
  est.censored_fraction = aggregate_value(est.report, "censored", "fraction");
  return est;
}

DelayCurve delay_curve(const DetectorConfig& cfg,
                       const std::function<StreamSpec(double)>& scenario,
                       const std::vector<double>& deltas, std::int64_t trials,
                       std::uint64_t base_seed, int parallelism) {
  if (deltas.empty()) throw std::invalid_argument("empty delta grid");
  DelayCurve curve;
  for (double delta : deltas) {
    ExperimentSpec spec;
    spec.detector = cfg;
    spec.stream = scenario(delta);
    spec.trials = trials;
    spec.base_seed = base_seed;
    spec.parallelism = parallelism;
    const ExperimentReport report = run_experiment(spec);
    DelayCurveRow row;
    row.delta = delta;
    for (const TrialResult& t : report.trials) {
      if (t.alarmed)
        ++row.alarmed;
      else
        ++row.censored;
    }
    if (row.alarmed == 0) {
      row.excluded = true;
      row.mean_delay = kNaN;
    } else {
      row.mean_delay = aggregate_value(report, "delay", "mean");
      row.sd_delay = aggregate_value(report, "delay", "sd");
      if (!(row.mean_delay > 0.0)) row.excluded = true;
    }
    curve.rows.push_back(row);
  }
  std::vector<double> lx, ly;
  for (const DelayCurveRow& row : curve.rows) {
    if (row.excluded) continue;
    lx.push_back(std::log(row.delta));
    ly.push_back(std::log(row.mean_delay));
  }
  if (lx.size() >= 2) {
    const double mx = mean_of(lx), my = mean_of(ly);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      num += (lx[i] - mx) * (ly[i] - my);
      den += (lx[i] - mx) * (lx[i] - mx);
    }
    if (den > 0.0) {
      curve.loglog_slope = num / den;
      curve.slope_valid = true;
    }
  }
  return curve;
}

std::vector<TProbeRow> t_dependence_probe(
    const DetectorConfig& cfg,
    const std::function<StreamSpec(std::int64_t)>& scenario,
    const std::vector<std::int64_t>& t_grid, std::int64_t trials,
    std::uint64_t base_seed, int parallelism) {
  std::vector<TProbeRow> rows;
  for (std::int64_t T : t_grid) {
    TProbeRow row;
    row.change_at = T;
    for (DetectorKind kind : {DetectorKind::fcs, DetectorKind::bcs}) {
      ExperimentSpec spec;
      spec.detector = cfg;
      spec.detector.kind = kind;
      spec.stream = scenario(T);
      spec.trials = trials;
      spec.base_seed = base_seed;  // paired streams across the two detectors
      spec.parallelism = parallelism;
      const ExperimentReport report = run_experiment(spec);
      double mean = kNaN;
      std::int64_t alarmed = 0;
      for (const TrialResult& t : report.trials)
        if (t.alarmed) ++alarmed;
      if (alarmed > 0) mean = aggregate_value(report, "delay", "mean");
      if (kind == DetectorKind::fcs) {
        row.fcs_mean_delay = mean;
        row.fcs_alarmed = alarmed;
      } else {
        row.bcs_mean_delay = mean;
        row.bcs_alarmed = alarmed;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void emit_csv(const ExperimentReport& report, std::ostream& out,
              bool with_timestamp) {
  out << "# scd-report v1\n";
  if (with_timestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# generated " << buf << "\n";
  }
  out << "trial_index,seed,alarmed,tau,delay,t_hat,eps_hat,censored\n";
  for (const TrialResult& t : report.trials) {
    out << t.trial_index << ',' << t.seed << ',' << (t.alarmed ? 1 : 0) << ','
        << t.tau << ',' << t.delay << ',' << t.t_hat << ',' << fmt(t.eps_hat)
        << ',' << (t.censored ? 1 : 0) << '\n';
  }
  out << "\nmetric,name,value\n";
  for (const AggregateRow& row : report.aggregates)
    out << row.metric << ',' << row.name << ',' << fmt(row.value) << '\n';
}

void emit_csv(const ExperimentReport& report, const std::string& path,
              bool with_timestamp) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  emit_csv(report, out, with_timestamp);
}

}  // namespace scd
