// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
#include "scd/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace scd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

const AlarmReport& Detector::report() const {
  if (status_ != StepStatus::alarmed)
    throw std::logic_error("no alarm report before alarm");
  return report_;
}

void Detector::require_running() const {
  if (status_ != StepStatus::running) throw std::logic_error("detector stopped");
}

void Detector::check_step_budget(std::int64_t max_steps) const {
  if (n_ >= max_steps) throw std::runtime_error("step limit exceeded (max_steps)");
}

std::int64_t estimate_changepoint(const std::vector<double>& separations) {
  std::int64_t t_hat = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < separations.size(); ++i) {
    const double s = separations[i];
    if (s >= 0.0 && s >= best) {
      best = s;
      t_hat = static_cast<std::int64_t>(i + 1);
    }
  }
  return t_hat;
}

double estimate_magnitude(const Interval& c, const Interval& b) {
  return span(c, b);
}

Interval backward_smallest(const std::vector<double>& buffer,
                           const ScalarCsFactory& factory,
                           Sidedness backward_side, double theta_min,
                           double theta_max) {
  if (buffer.empty()) throw std::invalid_argument("empty buffer");
  auto cs = factory();
  RunningIntersection ri;
  for (std::size_t i = buffer.size(); i-- > 0;)
    ri.fold(apply_sidedness(cs->step(buffer[i]), backward_side, theta_min,
                            theta_max));
  return ri.current;
}

ScalarDetector::ScalarDetector(const DetectorConfig& cfg, ScalarCsFactory factory,
                               double theta_min, double theta_max)
    : cfg_(cfg),
      factory_(std::move(factory)),
      theta_min_(theta_min),
      theta_max_(theta_max),
      forward_(factory_()) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw std::invalid_argument("alpha outside (0,1)");
  if (cfg.check_frequency < 1) throw std::invalid_argument("check_frequency must be >= 1");
}

StepStatus ScalarDetector::step(const Observation& obs) {
  require_running();
  check_step_budget(cfg_.max_steps);
  if (obs.is_pair) throw std::invalid_argument("scalar detector fed a pair");
  ++n_;
  buffer_.push_back(obs.x);
  // known theta0: BCS pins the forward set to the point; FCS keeps the data
  // CS and folds the point in as well, so the alarm fires as soon as some
  // C_n excludes theta0.
  Interval c;
  Interval raw;
  if (cfg_.known_theta0 && cfg_.kind == DetectorKind::bcs) {
    raw = c = Interval::make(*cfg_.known_theta0, *cfg_.known_theta0);
  } else {
    raw = c = apply_sidedness(forward_->step(obs.x), cfg_.sidedness, theta_min_,
                              theta_max_);
    if (cfg_.known_theta0)
      c = intersect(c, Interval::make(*cfg_.known_theta0, *cfg_.known_theta0));
  }
  const Interval prev = running_.current;
  running_.fold(c);
  snapshots_.push_back(running_.current);
  bool alarm = running_.current.empty;
  if (alarm) {
    pair_a_ = prev;
    pair_b_ = raw;
  } else if (cfg_.kind == DetectorKind::bcs && n_ % cfg_.check_frequency == 0) {
    // backward fold; if it collapses on its own, the alarm pair is the last
    // nonempty prefix and the window set that emptied it
    auto cs = factory_();
    RunningIntersection ri;
    Interval bprev, bbrk;
    bool collapsed = false;
    for (std::size_t i = buffer_.size(); i-- > 0;) {
      const Interval w = apply_sidedness(cs->step(buffer_[i]),
                                         mirror(cfg_.sidedness), theta_min_,
                                         theta_max_);
      if (!collapsed && intersect(ri.current, w).empty) {
        bprev = ri.current;
        bbrk = w;
        collapsed = true;
      }
      ri.fold(w);
    }
    if (collapsed) {
      alarm = true;
      pair_a_ = bprev;
      pair_b_ = bbrk;
    } else {
      alarm = intersect(running_.current, ri.current).empty;
      if (alarm) {
        pair_a_ = running_.current;
        pair_b_ = ri.current;
      }
    }
  }
  if (alarm) {
    status_ = StepStatus::alarmed;
    finalize_alarm();
  }
  return status_;
}

void ScalarDetector::finalize_alarm() {
  report_.tau = n_;
  const std::size_t n = buffer_.size();
  std::vector<Interval> bsets(n);
  auto cs = factory_();
  RunningIntersection ri;
  const Sidedness back = mirror(cfg_.sidedness);
  for (std::size_t s = 1; s <= n; ++s) {
    const Interval raw = cs->step(buffer_[n - s]);
    ri.fold(apply_sidedness(raw, back, theta_min_, theta_max_));
    bsets[n - s] = ri.current;  // B_{n+1-s}^{(n)}
  }
  report_.separations.assign(n, -1.0);
  for (std::size_t t = 1; t <= n; ++t) {
    const Interval& c = snapshots_[t - 1];
    const Interval& b = bsets[t - 1];
    if (c.empty || b.empty) continue;
    report_.separations[t - 1] = separation(c, b);
  }
  report_.t_hat = estimate_changepoint(report_.separations);
  if (report_.t_hat == 0) report_.t_hat = n_;
  report_.eps_hat = kNaN;
  if (!pair_a_.empty && !pair_b_.empty && pair_a_.bounded() && pair_b_.bounded())
    report_.eps_hat = estimate_magnitude(pair_a_, pair_b_);
}

KsDetector::KsDetector(const DetectorConfig& cfg)
    : cfg_(cfg), forward_(cfg.alpha) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw std::invalid_argument("alpha outside (0,1)");
  if (cfg.check_frequency < 1) throw std::invalid_argument("check_frequency must be >= 1");
  if (cfg.sidedness != Sidedness::two_sided)
    throw std::invalid_argument("KS bands are two-sided only");
  if (cfg.known_theta0)
    throw std::invalid_argument("known_theta0 unsupported for CDF bands");
}

StepStatus KsDetector::step(const Observation& obs) {
  require_running();
  check_step_budget(cfg_.max_steps);
  if (obs.is_pair) throw std::invalid_argument("scalar detector fed a pair");
  ++n_;
  buffer_.push_back(obs.x);
  const CdfBand band = forward_.step(obs.x);
  const BandEnvelope prev = env_;
  if (!band.vacuous()) env_ = fold_band(env_, band);
  bool alarm = !band_feasible(env_);
  if (alarm) {
    pair_a_ = prev;
    pair_b_ = BandEnvelope::from_band(band);
  } else if (cfg_.kind == DetectorKind::bcs && n_ % cfg_.check_frequency == 0) {
    KsCs cs(cfg_.alpha);
    BandEnvelope benv;
    BandEnvelope bprev, bbrk;
    bool collapsed = false;
    for (std::size_t i = buffer_.size(); i-- > 0;) {
      const CdfBand b = cs.step(buffer_[i]);
      if (b.vacuous()) continue;
      const BandEnvelope folded = fold_band(benv, b);
      if (!collapsed && !band_feasible(folded)) {
        bprev = benv;
        bbrk = BandEnvelope::from_band(b);
        collapsed = true;
      }
      benv = folded;
    }
    if (collapsed) {
      alarm = true;
      pair_a_ = bprev;
      pair_b_ = bbrk;
    } else {
      alarm = !band_feasible(fold_envelopes(env_, benv));
      if (alarm) {
        pair_a_ = env_;
        pair_b_ = benv;
      }
    }
  }
  if (alarm) {
    status_ = StepStatus::alarmed;
    finalize_alarm();
  }
  return status_;
}

void KsDetector::finalize_alarm() {
  report_.tau = n_;
  const std::size_t n = buffer_.size();
  std::vector<BandEnvelope> bsets(n);
  {
    KsCs cs(cfg_.alpha);
    BandEnvelope env;
    for (std::size_t s = 1; s <= n; ++s) {
      const CdfBand band = cs.step(buffer_[n - s]);
      if (!band.vacuous()) env = fold_band(env, band);
      bsets[n - s] = env;
    }
  }
  report_.separations.assign(n, -1.0);
  {
    KsCs cs(cfg_.alpha);
    BandEnvelope env;
    for (std::size_t t = 1; t <= n; ++t) {
      const CdfBand band = cs.step(buffer_[t - 1]);
      if (!band.vacuous()) env = fold_band(env, band);
      if (band_feasible(env) && band_feasible(bsets[t - 1]))
        report_.separations[t - 1] = band_separation(env, bsets[t - 1]);
    }
  }
  report_.t_hat = estimate_changepoint(report_.separations);
  if (report_.t_hat == 0) report_.t_hat = n_;
  report_.eps_hat = band_span(pair_a_, pair_b_);
}

MmdDetector::MmdDetector(const DetectorConfig& cfg)
    : cfg_(cfg),
      cs_(cfg.mmd_bandwidth ? MmdCs(cfg.alpha, KernelSpec{*cfg.mmd_bandwidth})
                            : MmdCs(cfg.alpha)) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw std::invalid_argument("alpha outside (0,1)");
  if (cfg.check_frequency < 1) throw std::invalid_argument("check_frequency must be >= 1");
  if (cfg.sidedness != Sidedness::two_sided)
    throw std::invalid_argument("MMD sets are two-sided only");
  if (cfg.known_theta0 && *cfg.known_theta0 < 0.0)
    throw std::invalid_argument("known MMD distance must be >= 0");
}

Interval MmdDetector::window_set(double mhat, std::int64_t s) const {
  return Interval::make(std::max(0.0, mhat - mmd_gamma(s, cfg_.alpha)),
                        mhat + 2.0 * mmd_kappa(s, cfg_.alpha));
}

StepStatus MmdDetector::step(const Observation& obs) {
  require_running();
  check_step_budget(cfg_.max_steps);
  if (!obs.is_pair) throw std::invalid_argument("MMD detector needs paired observations");
  ++n_;
  const Interval raw = cs_.step(obs.u, obs.v);
  Interval c = raw;
  if (cfg_.known_theta0) {
    const Interval pt = Interval::make(*cfg_.known_theta0, *cfg_.known_theta0);
    c = (cfg_.kind == DetectorKind::bcs) ? pt : intersect(raw, pt);
  }
  const Interval prev = running_.current;
  running_.fold(c);
  snapshots_.push_back(running_.current);
  bool alarm = running_.current.empty;
  if (alarm) {
    pair_a_ = prev;
    pair_b_ = raw;
  } else if (cfg_.kind == DetectorKind::bcs && n_ % cfg_.check_frequency == 0) {
    const MmdCs::SuffixScan scan = cs_.suffix_scan();
    RunningIntersection ri;
    Interval bprev, bbrk;
    bool collapsed = false;
    for (std::int64_t a = n_; a >= 1; --a) {
      const Interval w = window_set(scan.mmd(a), n_ - a + 1);
      if (!collapsed && intersect(ri.current, w).empty) {
        bprev = ri.current;
        bbrk = w;
        collapsed = true;
      }
      ri.fold(w);
    }
    if (collapsed) {
      alarm = true;
      pair_a_ = bprev;
      pair_b_ = bbrk;
    } else {
      alarm = intersect(running_.current, ri.current).empty;
      if (alarm) {
        pair_a_ = running_.current;
        pair_b_ = ri.current;
      }
    }
  }
  if (alarm) {
    status_ = StepStatus::alarmed;
    finalize_alarm();
  }
  return status_;
}

void MmdDetector::finalize_alarm() {
  report_.tau = n_;
  const std::size_t n = static_cast<std::size_t>(n_);
  const MmdCs::SuffixScan scan = cs_.suffix_scan();
  std::vector<Interval> bsets(n);
  RunningIntersection ri;
  for (std::int64_t a = n_; a >= 1; --a) {
    ri.fold(window_set(scan.mmd(a), n_ - a + 1));
    bsets[a - 1] = ri.current;  // B_a^{(n)}
  }
  report_.separations.assign(n, -1.0);
  for (std::size_t t = 1; t <= n; ++t) {
    const Interval& c = snapshots_[t - 1];
    const Interval& b = bsets[t - 1];
    if (c.empty || b.empty) continue;
    report_.separations[t - 1] = separation(c, b);
  }
  report_.t_hat = estimate_changepoint(report_.separations);
  if (report_.t_hat == 0) report_.t_hat = n_;
  report_.eps_hat = kNaN;
  if (!pair_a_.empty && !pair_b_.empty && pair_a_.bounded() && pair_b_.bounded())
    report_.eps_hat = estimate_magnitude(pair_a_, pair_b_);
}

std::unique_ptr<Detector> make_detector(const DetectorConfig& cfg) {
  switch (cfg.family) {
    case CsFamily::gaussian_mean: {
      struct Adapter : ScalarCs {
        GaussianCs cs;
        explicit Adapter(double a) : cs(a) {}
        Interval step(double x) override { return cs.step(x); }
      };
      const double a = cfg.alpha;
      return std::make_unique<ScalarDetector>(
          cfg, [a] { return std::make_unique<Adapter>(a); }, -kInf, kInf);
    }
    case CsFamily::bounded_mean: {
      struct Adapter : ScalarCs {
        EbCs cs;
        explicit Adapter(double a) : cs(a) {}
        Interval step(double x) override { return cs.step(x); }
      };
      const double a = cfg.alpha;
      return std::make_unique<ScalarDetector>(
          cfg, [a] { return std::make_unique<Adapter>(a); }, 0.0, 1.0);
    }
    case CsFamily::ks_cdf:
      return std::make_unique<KsDetector>(cfg);
    case CsFamily::mmd_pair:
      return std::make_unique<MmdDetector>(cfg);
  }
  throw std::invalid_argument("unknown CS family");
}

namespace {

// Linear scan over the first block, then geometric jumps and a bisection on
// the (eventually monotone) tail. Returns -1 if nothing <= bound satisfies.
std::int64_t scan_smallest(const std::function<bool(std::int64_t)>& cond) {
  constexpr std::int64_t kLinear = 4096;
  constexpr std::int64_t kBound = 1000000000;
  for (std::int64_t t = 1; t <= kLinear; ++t)
    if (cond(t)) return t;
  std::int64_t lo = kLinear, hi = kLinear;
  for (;;) {
    if (lo >= kBound) return -1;
    hi = std::min(lo * 2, kBound);
    if (cond(hi)) break;
    if (hi == kBound) return -1;
    lo = hi;
  }
  while (lo + 1 < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (cond(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

DelayCertificate solve_u0(const WidthFn& width_post, const WidthFn& width_pre,
                          std::int64_t change_at, double delta, double alpha) {
  if (!(delta > 0.0)) throw std::invalid_argument("no separation");
  DelayCertificate cert;
  cert.delta = delta;
  cert.alpha = alpha;
  cert.change_at = change_at;
  const double w_pre = width_pre(change_at);
  const std::int64_t t =
      scan_smallest([&](std::int64_t s) { return width_post(s) + w_pre < delta; });
  if (t < 0) {
    cert.reachable = false;
    cert.u0 = 0;
  } else {
    cert.u0 = t;
  }
  return cert;
}

DelayCertificate solve_t0(const WidthFn& width_post, std::int64_t change_at,
                          double delta, double alpha) {
  return solve_u0(width_post, [](std::int64_t) { return 0.0; }, change_at,
                  delta, alpha);
}

std::int64_t fcs_delay_certificate(const WidthFn& width, std::int64_t change_at,
                                   double delta) {
  const double w_t = width(change_at);
  if (!(delta > w_t))
    throw std::invalid_argument("change not certifiably detectable");
  const double dT = static_cast<double>(change_at);
  const std::int64_t u = scan_smallest([&](std::int64_t s) {
    const double t = dT + static_cast<double>(s);
    return width(change_at + s) + w_t <= (static_cast<double>(s) / t) * delta;
  });
  if (u < 0) throw std::runtime_error("certificate scan bound exceeded");
  return u;
}

CusumState make_cusum(double mu0, double mu1, double b_alpha) {
  if (!(b_alpha > 0.0)) throw std::invalid_argument("threshold must be positive");
  CusumState s;
  s.log_w = -kInf;  // W_1 = 0
  s.log_b = std::log(b_alpha);
  s.mu0 = mu0;
  s.mu1 = mu1;
  return s;
}

double gaussian_log_lr(double x, double mu0, double mu1) {
  return (mu1 - mu0) * x - (mu1 * mu1 - mu0 * mu0) / 2.0;
}

bool cusum_step(CusumState& state, double x) {
  if (state.alarmed) throw std::logic_error("detector stopped");
  ++state.n;
  if (state.n >= 2)
    state.log_w = std::max(state.log_w, 0.0) + gaussian_log_lr(x, state.mu0, state.mu1);
  if (state.log_w >= state.log_b) state.alarmed = true;
  return state.alarmed;
}

std::int64_t cusum2_stop(const std::vector<double>& xs, double b_alpha,
                         double mu0, double mu1) {
  if (!(b_alpha > 0.0)) throw std::invalid_argument("threshold must be positive");
  const double log_b = std::log(b_alpha);
  // suffix log-products L_t^n for t = 1..n-1, each accumulated in arrival
  // order so the backward tests see the same rounded values at every n
  std::vector<double> suffix;  // entry i holds the product starting at a=i+2
  for (std::size_t n = 1; n <= xs.size(); ++n) {
    const double llr = gaussian_log_lr(xs[n - 1], mu0, mu1);
    for (double& s : suffix) s += llr;
    if (n >= 2) suffix.push_back(llr);  // suffix starting at a = n
    for (const double s : suffix)
      if (s >= log_b) return static_cast<std::int64_t>(n);
  }
  return 0;
}

}  // namespace scd
