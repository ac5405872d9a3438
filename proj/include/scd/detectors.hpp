// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
#ifndef SCD_DETECTORS_HPP
#define SCD_DETECTORS_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "scd/cs.hpp"
#include "scd/sets.hpp"
#include "scd/streams.hpp"

namespace scd {

enum class DetectorKind { fcs, bcs };
enum class CsFamily { gaussian_mean, bounded_mean, ks_cdf, mmd_pair };

struct DetectorConfig {
  double alpha = 0.05;
  CsFamily family = CsFamily::gaussian_mean;
  DetectorKind kind = DetectorKind::bcs;
  Sidedness sidedness = Sidedness::two_sided;
  std::int64_t check_frequency = 1;  // backward rebuild every k steps
  std::int64_t max_steps = 1000000;  // buffer grows with n; fail loudly
  std::optional<double> known_theta0;   // bcs: pin the forward set to this
                                        // point; fcs: alarm once the forward
                                        // CS excludes it
  std::optional<double> mmd_bandwidth;  // fixed kernel bandwidth
};

enum class StepStatus { running, alarmed };

struct AlarmReport {
  std::int64_t tau = 0;
  std::int64_t t_hat = 0;
  double eps_hat = 0.0;
  // d(C~_t, B_t^{(tau)}) for t = 1..tau; -1 marks t where either set was
  // empty/unavailable (excluded from the argmax)
  std::vector<double> separations;
};

class Detector {
 public:
  virtual ~Detector() = default;
  virtual StepStatus step(const Observation& obs) = 0;
  StepStatus status() const { return status_; }
  std::int64_t n() const { return n_; }
  const AlarmReport& report() const;

 protected:
  void require_running() const;
  void check_step_budget(std::int64_t max_steps) const;
  StepStatus status_ = StepStatus::running;
  std::int64_t n_ = 0;
  AlarmReport report_;
};

std::unique_ptr<Detector> make_detector(const DetectorConfig& cfg);

// Largest t attaining the maximal separation (ties toward the largest index).
// Entries < 0 are excluded; returns 0 if no valid entry.
std::int64_t estimate_changepoint(const std::vector<double>& separations);

// Magnitude estimate: the span of the two sets whose disjointness fired the
// alarm (running forward intersection vs smallest backward set; for a
// forward-only alarm, the previous intersection vs the set that emptied it).
double estimate_magnitude(const Interval& c, const Interval& b);

// --- scalar-interval detector with an injectable CS construction ---

class ScalarCs {
 public:
  virtual ~ScalarCs() = default;
  virtual Interval step(double x) = 0;
};
using ScalarCsFactory = std::function<std::unique_ptr<ScalarCs>()>;

// Smallest backward set B_1^{(n)}: a fresh CS fed the buffer in reverse,
// folded into a running intersection.
Interval backward_smallest(const std::vector<double>& buffer,
                           const ScalarCsFactory& factory,
                           Sidedness backward_side, double theta_min,
                           double theta_max);

class ScalarDetector : public Detector {
 public:
  ScalarDetector(const DetectorConfig& cfg, ScalarCsFactory factory,
                 double theta_min, double theta_max);
  StepStatus step(const Observation& obs) override;
  const Interval& forward_set() const { return running_.current; }
  const std::vector<Interval>& snapshots() const { return snapshots_; }

 private:
  void finalize_alarm();
  DetectorConfig cfg_;
  ScalarCsFactory factory_;
  double theta_min_, theta_max_;
  std::unique_ptr<ScalarCs> forward_;
  RunningIntersection running_;
  std::vector<Interval> snapshots_;
  std::vector<double> buffer_;
  Interval pair_a_ = Interval::whole();
  Interval pair_b_ = Interval::whole();
};

// --- KS band detector ---

class KsDetector : public Detector {
 public:
  explicit KsDetector(const DetectorConfig& cfg);
  StepStatus step(const Observation& obs) override;
  const BandEnvelope& forward_envelope() const { return env_; }

 private:
  void finalize_alarm();
  DetectorConfig cfg_;
  KsCs forward_;
  BandEnvelope env_;
  std::vector<double> buffer_;
  BandEnvelope pair_a_;
  BandEnvelope pair_b_;
};

// --- paired-sample MMD detector ---

class MmdDetector : public Detector {
 public:
  explicit MmdDetector(const DetectorConfig& cfg);
  StepStatus step(const Observation& obs) override;
  const Interval& forward_set() const { return running_.current; }

 private:
  Interval window_set(double mhat, std::int64_t s) const;
  void finalize_alarm();
  DetectorConfig cfg_;
  MmdCs cs_;
  RunningIntersection running_;
  std::vector<Interval> snapshots_;
  Interval pair_a_ = Interval::whole();
  Interval pair_b_ = Interval::whole();
};

// --- delay certificates ---

using WidthFn = std::function<double(std::int64_t)>;

struct DelayCertificate {
  std::int64_t u0 = 0;
  bool reachable = true;  // false: no t <= 1e9 satisfies the inequality
  double delta = 0.0;
  double alpha = 0.0;
  std::int64_t change_at = 0;
};

// Smallest t >= 1 with width_post(t) + width_pre(T) < delta (strict;
// equality counts as not satisfied).
DelayCertificate solve_u0(const WidthFn& width_post, const WidthFn& width_pre,
                          std::int64_t change_at, double delta, double alpha);
// Known pre-change parameter: width_pre == 0.
DelayCertificate solve_t0(const WidthFn& width_post, std::int64_t change_at,
                          double delta, double alpha);

// Smallest u >= 1 with w(T+u) + w(T) <= (u/(T+u)) * delta.
std::int64_t fcs_delay_certificate(const WidthFn& width, std::int64_t change_at,
                                   double delta);

// --- CuSum baseline (Gaussian unit-variance likelihood ratio) ---

struct CusumState {
  double log_w;  // log W_n; W_1 = 0
  double log_b;
  double mu0, mu1;
  std::int64_t n = 0;
  bool alarmed = false;
};

CusumState make_cusum(double mu0, double mu1, double b_alpha);
double gaussian_log_lr(double x, double mu0, double mu1);
bool cusum_step(CusumState& state, double x);  // true once alarmed

// Repeated backward power-one tests over suffixes (lengths 1..n-1, matching
// the W_1 = 0 convention); returns the first firing n, or 0 if none.
std::int64_t cusum2_stop(const std::vector<double>& xs, double b_alpha,
                         double mu0, double mu1);

}  // namespace scd

#endif
