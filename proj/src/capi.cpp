// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
#include "scd/scd.h"

#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "scd/cs.hpp"
#include "scd/detectors.hpp"
#include "scd/harness.hpp"
#include "scd/streams.hpp"

using nlohmann::json;

namespace {

constexpr const char* kVersion = "scd 1.0.0";

void put_str(const std::string& s, char* buf, size_t cap) {
  if (!buf || cap == 0) return;
  const size_t n = std::min(s.size(), cap - 1);
  std::memcpy(buf, s.data(), n);
  buf[n] = '\0';
}

struct SchemaErrors {
  std::vector<std::string> fields;
  void add(const std::string& field, const std::string& what) {
    fields.push_back(field + " (" + what + ")");
  }
  void raise_if_any() const {
    if (fields.empty()) return;
    std::string msg = "invalid config fields: ";
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i) msg += ", ";
      msg += fields[i];
    }
    throw std::invalid_argument(msg);
  }
};

double get_num(const json& j, const char* key, double fallback, SchemaErrors& errs) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    errs.add(key, "expected number");
    return fallback;
  }
  return j[key].get<double>();
}

std::int64_t get_int(const json& j, const char* key, std::int64_t fallback,
                     SchemaErrors& errs) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) {
    errs.add(key, "expected integer");
    return fallback;
  }
  return j[key].get<std::int64_t>();
}

std::string get_str(const json& j, const char* key, const std::string& fallback,
                    SchemaErrors& errs) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) {
    errs.add(key, "expected string");
    return fallback;
  }
  return j[key].get<std::string>();
}

scd::CsFamily parse_family(const std::string& name, SchemaErrors& errs) {
  if (name == "gaussian_mean") return scd::CsFamily::gaussian_mean;
  if (name == "bounded_mean") return scd::CsFamily::bounded_mean;
  if (name == "ks_cdf") return scd::CsFamily::ks_cdf;
  if (name == "mmd_pair") return scd::CsFamily::mmd_pair;
  errs.add("family", "unknown value '" + name + "'");
  return scd::CsFamily::gaussian_mean;
}

scd::DetectorConfig parse_detector_config(const json& j, SchemaErrors& errs) {
  scd::DetectorConfig cfg;
  cfg.alpha = get_num(j, "alpha", 0.05, errs);
  cfg.family = parse_family(get_str(j, "family", "gaussian_mean", errs), errs);
  const std::string kind = get_str(j, "detector", "bcs", errs);
  if (kind == "bcs")
    cfg.kind = scd::DetectorKind::bcs;
  else if (kind == "fcs")
    cfg.kind = scd::DetectorKind::fcs;
  else
    errs.add("detector", "expected 'bcs' or 'fcs'");
  const std::string side = get_str(j, "sidedness", "two_sided", errs);
  if (side == "two_sided")
    cfg.sidedness = scd::Sidedness::two_sided;
  else if (side == "upper_only")
    cfg.sidedness = scd::Sidedness::upper_only;
  else if (side == "lower_only")
    cfg.sidedness = scd::Sidedness::lower_only;
  else
    errs.add("sidedness", "unknown value '" + side + "'");
  cfg.check_frequency = get_int(j, "check_frequency", 1, errs);
  cfg.max_steps = get_int(j, "max_steps", 1000000, errs);
  if (j.contains("known_theta0") && !j["known_theta0"].is_null())
    cfg.known_theta0 = get_num(j, "known_theta0", 0.0, errs);
  if (j.contains("mmd_bandwidth") && !j["mmd_bandwidth"].is_null())
    cfg.mmd_bandwidth = get_num(j, "mmd_bandwidth", 1.0, errs);
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) errs.add("alpha", "outside (0,1)");
  if (cfg.check_frequency < 1) errs.add("check_frequency", "must be >= 1");
  if (cfg.max_steps < 1) errs.add("max_steps", "must be >= 1");
  return cfg;
}

scd::StreamFamily parse_stream_family(const std::string& name, SchemaErrors& errs) {
  if (name == "gaussian_mean") return scd::StreamFamily::gaussian_mean;
  if (name == "bounded_mixture") return scd::StreamFamily::bounded_mixture;
  if (name == "t_location_scale") return scd::StreamFamily::t_location_scale;
  if (name == "paired_mvn") return scd::StreamFamily::paired_mvn;
  if (name == "classifier_risk") return scd::StreamFamily::classifier_risk;
  if (name == "file") return scd::StreamFamily::file;
  errs.add("stream.family", "unknown value '" + name + "'");
  return scd::StreamFamily::gaussian_mean;
}

scd::StreamSpec parse_stream_spec(const json& j, SchemaErrors& errs) {
  scd::StreamSpec spec;
  spec.family = parse_stream_family(get_str(j, "family", "gaussian_mean", errs), errs);
  spec.theta0 = get_num(j, "theta0", 0.0, errs);
  spec.theta1 = get_num(j, "theta1", 0.0, errs);
  if (j.contains("change_at") && !j["change_at"].is_null())
    spec.change_at = get_int(j, "change_at", scd::kNoChange, errs);
  spec.horizon = get_int(j, "horizon", 0, errs);
  spec.seed = static_cast<std::uint64_t>(get_int(j, "seed", 1, errs));
  spec.cov_seed = static_cast<std::uint64_t>(get_int(j, "cov_seed", 0, errs));
  spec.path = get_str(j, "path", "", errs);
  if (spec.family != scd::StreamFamily::file && spec.horizon < 1)
    errs.add("stream.horizon", "must be >= 1");
  if (spec.family == scd::StreamFamily::file && spec.path.empty())
    errs.add("stream.path", "required for family 'file'");
  return spec;
}

scd::ExperimentSpec parse_experiment(const json& j, SchemaErrors& errs) {
  scd::ExperimentSpec spec;
  spec.detector = parse_detector_config(j, errs);
  if (!j.contains("stream") || !j["stream"].is_object()) {
    errs.add("stream", "expected object");
  } else {
    spec.stream = parse_stream_spec(j["stream"], errs);
  }
  spec.trials = get_int(j, "trials", 250, errs);
  spec.base_seed = static_cast<std::uint64_t>(get_int(j, "seed", 1, errs));
  spec.arl_truncation = get_int(j, "arl_truncation", 200, errs);
  spec.parallelism = static_cast<int>(get_int(j, "parallelism", 1, errs));
  if (spec.trials < 1) errs.add("trials", "must be >= 1");
  return spec;
}

// Post-change parameter realizing change magnitude `delta` for one family.
scd::StreamSpec scenario_for_delta(scd::StreamSpec tmpl, double delta) {
  switch (tmpl.family) {
    case scd::StreamFamily::gaussian_mean:
    case scd::StreamFamily::bounded_mixture:
      tmpl.theta1 = tmpl.theta0 + delta;
      break;
    case scd::StreamFamily::t_location_scale:
      tmpl.theta1 = scd::t3_shift_for_ks(delta);
      break;
    case scd::StreamFamily::paired_mvn:
      tmpl.theta1 = delta;  // mean shift; the MMD gap grows with it
      break;
    case scd::StreamFamily::classifier_risk:
      tmpl.theta1 = scd::rotation_for_risk_gap(delta);
      break;
    case scd::StreamFamily::file:
      throw std::invalid_argument("delta grid over a file stream");
  }
  return tmpl;
}

json aggregates_json(const scd::ExperimentReport& report) {
  json out = json::object();
  for (const auto& row : report.aggregates) {
    const std::string key = row.metric + "." + row.name;
    if (std::isfinite(row.value))
      out[key] = row.value;
    else
      out[key] = nullptr;
  }
  return out;
}

scd::WidthFn width_for(const std::string& family, double alpha, bool zero,
                       const std::string& width_proxy) {
  if (zero) return [](std::int64_t) { return 0.0; };
  std::string eff = family;
  if (family == "bounded_mean") {
    if (width_proxy.empty())
      throw std::invalid_argument(
          "bounded_mean has no analytic width; set width_proxy");
    eff = width_proxy;
  }
  if (eff == "gaussian_mean")
    return [alpha](std::int64_t t) { return scd::gaussian_width(t, alpha); };
  if (eff == "ks_cdf")
    return [alpha](std::int64_t t) { return scd::ks_width(t, alpha); };
  if (eff == "mmd_pair")
    return [alpha](std::int64_t t) { return scd::mmd_width(t, alpha); };
  throw std::invalid_argument("no analytic width for family '" + eff + "'");
}

json run_certificate(const json& cfg) {
  SchemaErrors errs;
  const double alpha = get_num(cfg, "alpha", 0.05, errs);
  const double delta = get_num(cfg, "delta", 0.0, errs);
  const std::int64_t T = get_int(cfg, "change_at", 0, errs);
  const std::string family = get_str(cfg, "family", "gaussian_mean", errs);
  const std::string width_proxy = get_str(cfg, "width_proxy", "", errs);
  const bool zero = cfg.contains("zero_widths") && cfg["zero_widths"].is_boolean() &&
                    cfg["zero_widths"].get<bool>();
  const bool known = cfg.contains("known_theta0") && cfg["known_theta0"].is_boolean() &&
                     cfg["known_theta0"].get<bool>();
  if (T < 1) errs.add("change_at", "must be >= 1");
  errs.raise_if_any();

  const scd::WidthFn width = width_for(family, alpha, zero, width_proxy);
  const scd::DelayCertificate cert =
      known ? scd::solve_t0(width, T, delta, alpha)
            : scd::solve_u0(width, width, T, delta, alpha);
  json out;
  out["command"] = "certificate";
  out["kind"] = known ? "t0" : "u0";
  out["u0"] = cert.reachable ? json(cert.u0) : json(nullptr);
  out["reachable"] = cert.reachable;
  out["delta"] = cert.delta;
  out["alpha"] = cert.alpha;
  out["change_at"] = cert.change_at;
  if (!cert.reachable) out["message"] = "undetectable at this delta, T, alpha";
  try {
    out["fcs_delay"] = scd::fcs_delay_certificate(width, T, delta);
  } catch (const std::exception& e) {
    out["fcs_delay"] = nullptr;
    out["fcs_message"] = e.what();
  }
  return out;
}

void write_table_csv(const std::string& path, const std::string& header,
                     const std::vector<std::string>& rows, bool with_timestamp) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << "# scd-report v1\n";
  if (with_timestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# generated " << buf << "\n";
  }
  out << header << '\n';
  for (const auto& r : rows) out << r << '\n';
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

json run_command(const std::string& command, const json& cfg,
                 const char* csv_path, bool no_timestamp) {
  if (command == "certificate") return run_certificate(cfg);

  SchemaErrors errs;
  scd::ExperimentSpec spec = parse_experiment(cfg, errs);

  if (command == "simulate") {
    errs.raise_if_any();
    const scd::ExperimentReport report = scd::run_experiment(spec);
    if (csv_path) scd::emit_csv(report, csv_path, !no_timestamp);
    json out;
    out["command"] = "simulate";
    out["trials"] = spec.trials;
    out["aggregates"] = aggregates_json(report);
    return out;
  }
  if (command == "pfa") {
    errs.raise_if_any();
    const scd::PfaEstimate est = scd::estimate_pfa(spec);
    if (csv_path) scd::emit_csv(est.report, csv_path, !no_timestamp);
    json out;
    out["command"] = "pfa";
    out["fraction"] = est.fraction;
    out["ci_lower"] = est.ci_lower;
    out["ci_upper"] = est.ci_upper;
    out["alpha"] = spec.detector.alpha;
    return out;
  }
  if (command == "arl") {
    errs.raise_if_any();
    const scd::ArlEstimate est = scd::estimate_arl(spec);
    if (csv_path) scd::emit_csv(est.report, csv_path, !no_timestamp);
    json out;
    out["command"] = "arl";
    out["truncated_mean"] = est.truncated_mean;
    out["censored_fraction"] = est.censored_fraction;
    out["bound"] = 1.0 / (2.0 * spec.detector.alpha) - 1.5;
    return out;
  }
  if (command == "delay-curve") {
    std::vector<double> grid;
    if (!cfg.contains("delta_grid") || !cfg["delta_grid"].is_array() ||
        cfg["delta_grid"].empty()) {
      errs.add("delta_grid", "expected non-empty array");
    } else {
      for (const auto& v : cfg["delta_grid"]) {
        if (!v.is_number())
          errs.add("delta_grid", "expected numbers");
        else
          grid.push_back(v.get<double>());
      }
    }
    errs.raise_if_any();
    const scd::StreamSpec tmpl = spec.stream;
    const scd::DelayCurve curve = scd::delay_curve(
        spec.detector,
        [&tmpl](double d) { return scenario_for_delta(tmpl, d); }, grid,
        spec.trials, spec.base_seed, spec.parallelism);
    if (csv_path) {
      std::vector<std::string> rows;
      for (const auto& r : curve.rows) {
        std::ostringstream os;
        os << r.delta << ',' << fmt(r.mean_delay) << ',' << fmt(r.sd_delay)
           << ',' << r.alarmed << ',' << r.censored << ',' << (r.excluded ? 1 : 0);
        rows.push_back(os.str());
      }
      write_table_csv(csv_path,
                      "delta,mean_delay,sd_delay,alarmed,censored,excluded",
                      rows, !no_timestamp);
    }
    json out;
    out["command"] = "delay-curve";
    out["slope"] = curve.slope_valid ? json(curve.loglog_slope) : json(nullptr);
    json jrows = json::array();
    for (const auto& r : curve.rows) {
      json jr;
      jr["delta"] = r.delta;
      jr["mean_delay"] = std::isfinite(r.mean_delay) ? json(r.mean_delay) : json(nullptr);
      jr["sd_delay"] = r.sd_delay;
      jr["alarmed"] = r.alarmed;
      jr["censored"] = r.censored;
      jr["excluded"] = r.excluded;
      jrows.push_back(jr);
    }
    out["rows"] = jrows;
    return out;
  }
  if (command == "t-probe") {
    std::vector<std::int64_t> t_grid;
    if (!cfg.contains("t_grid") || !cfg["t_grid"].is_array() || cfg["t_grid"].empty()) {
      errs.add("t_grid", "expected non-empty array");
    } else {
      for (const auto& v : cfg["t_grid"]) {
        if (!v.is_number_integer())
          errs.add("t_grid", "expected integers");
        else
          t_grid.push_back(v.get<std::int64_t>());
      }
    }
    const std::int64_t post_horizon = get_int(cfg, "post_horizon", 2000, errs);
    errs.raise_if_any();
    const scd::StreamSpec tmpl = spec.stream;
    const auto rows = scd::t_dependence_probe(
        spec.detector,
        [&tmpl, post_horizon](std::int64_t T) {
          scd::StreamSpec s = tmpl;
          s.change_at = T;
          s.horizon = T + post_horizon;
          return s;
        },
        t_grid, spec.trials, spec.base_seed, spec.parallelism);
    if (csv_path) {
      std::vector<std::string> lines;
      for (const auto& r : rows) {
        std::ostringstream os;
        os << r.change_at << ',' << fmt(r.fcs_mean_delay) << ','
           << fmt(r.bcs_mean_delay) << ',' << r.fcs_alarmed << ',' << r.bcs_alarmed;
        lines.push_back(os.str());
      }
      write_table_csv(
          csv_path,
          "change_at,fcs_mean_delay,bcs_mean_delay,fcs_alarmed,bcs_alarmed",
          lines, !no_timestamp);
    }
    json out;
    out["command"] = "t-probe";
    json jrows = json::array();
    for (const auto& r : rows) {
      json jr;
      jr["change_at"] = r.change_at;
      jr["fcs_mean_delay"] = std::isfinite(r.fcs_mean_delay) ? json(r.fcs_mean_delay) : json(nullptr);
      jr["bcs_mean_delay"] = std::isfinite(r.bcs_mean_delay) ? json(r.bcs_mean_delay) : json(nullptr);
      jrows.push_back(jr);
    }
    out["rows"] = jrows;
    return out;
  }
  throw std::invalid_argument("unknown command '" + command + "'");
}

}  // namespace

struct scd_detector {
  std::unique_ptr<scd::Detector> impl;
};

extern "C" {

const char* scd_version(void) { return kVersion; }

scd_detector* scd_detector_create(const char* config_json, char* err,
                                  size_t err_cap) {
  try {
    const json j = json::parse(config_json ? config_json : "{}");
    SchemaErrors errs;
    const scd::DetectorConfig cfg = parse_detector_config(j, errs);
    errs.raise_if_any();
    auto* d = new scd_detector{scd::make_detector(cfg)};
    return d;
  } catch (const std::exception& e) {
    put_str(e.what(), err, err_cap);
    return nullptr;
  }
}

void scd_detector_destroy(scd_detector* d) { delete d; }

int scd_detector_step_scalar(scd_detector* d, double x, char* err,
                             size_t err_cap) {
  try {
    return d->impl->step(scd::Observation::scalar(x)) == scd::StepStatus::alarmed
               ? SCD_ALARM
               : SCD_OK;
  } catch (const std::exception& e) {
    put_str(e.what(), err, err_cap);
    return SCD_ERROR;
  }
}

int scd_detector_step_pair(scd_detector* d, const double* u, const double* v,
                           size_t dim, char* err, size_t err_cap) {
  try {
    std::vector<double> uu(u, u + dim), vv(v, v + dim);
    return d->impl->step(scd::Observation::pair(std::move(uu), std::move(vv))) ==
                   scd::StepStatus::alarmed
               ? SCD_ALARM
               : SCD_OK;
  } catch (const std::exception& e) {
    put_str(e.what(), err, err_cap);
    return SCD_ERROR;
  }
}

long long scd_detector_step_count(const scd_detector* d) {
  return static_cast<long long>(d->impl->n());
}

int scd_detector_report_json(const scd_detector* d, char* out, size_t out_cap,
                             char* err, size_t err_cap) {
  try {
    const scd::AlarmReport& rep = d->impl->report();
    json j;
    j["event"] = "alarm";
    j["tau"] = rep.tau;
    j["t_hat"] = rep.t_hat;
    j["eps_hat"] = std::isfinite(rep.eps_hat) ? json(rep.eps_hat) : json(nullptr);
    put_str(j.dump(), out, out_cap);
    return SCD_OK;
  } catch (const std::exception& e) {
    put_str(e.what(), err, err_cap);
    return SCD_ERROR;
  }
}

int scd_parse_line(const char* line, size_t line_no, int* is_pair, double* x,
                   double* u, double* v, size_t cap, size_t* dim, char* err,
                   size_t err_cap) {
  try {
    const scd::Observation obs =
        scd::parse_observation_line(line ? line : "", line_no);
    *is_pair = obs.is_pair ? 1 : 0;
    if (!obs.is_pair) {
      *x = obs.x;
      *dim = 0;
      return SCD_OK;
    }
    if (obs.u.size() > cap)
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": pair dimension exceeds buffer");
    std::copy(obs.u.begin(), obs.u.end(), u);
    std::copy(obs.v.begin(), obs.v.end(), v);
    *dim = obs.u.size();
    return SCD_OK;
  } catch (const std::exception& e) {
    put_str(e.what(), err, err_cap);
    return SCD_ERROR;
  }
}

int scd_run(const char* command, const char* config_json, const char* csv_path,
            int no_timestamp, char* summary, size_t summary_cap, char* err,
            size_t err_cap) {
  try {
    const json cfg = json::parse(config_json ? config_json : "{}");
    const json out = run_command(command ? command : "", cfg, csv_path,
                                 no_timestamp != 0);
    put_str(out.dump(), summary, summary_cap);
    return SCD_OK;
  } catch (const std::exception& e) {
    put_str(e.what(), err, err_cap);
    return SCD_ERROR;
  }
}

}  // extern "C"
