// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
#include "scd/cs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace scd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(log(x)), +inf when undefined or negative
double loglog_guarded(double x) {
  if (!(x > 1.0)) return kInf;
  const double l = std::log(x);
  if (!(l > 1.0)) return kInf;
  return std::log(l);
}

double psi_e(double x) { return (-std::log1p(-x) - x) / 4.0; }

double log2_floor_term(std::int64_t t) {
  return std::max(1.0, std::log2(static_cast<double>(t)));
}

}  // namespace

double gaussian_width(std::int64_t t, double alpha) {
  if (t < 1) return kInf;
  const double ll = loglog_guarded(2.0 * static_cast<double>(t));
  if (ll == kInf) return kInf;
  const double num = ll + 0.72 * std::log(10.4 / alpha);
  return 3.4 * std::sqrt(num / static_cast<double>(t));
}

double ks_width(std::int64_t t, double alpha) {
  if (t < 1) return kInf;
  const double inner = std::exp(1.0) * static_cast<double>(t);
  const double l = std::log(inner);
  if (!(l > 0.0)) return kInf;
  const double ll = std::log(l);
  if (ll < 0.0) return kInf;
  const double num = ll + 0.8 * std::log(1612.0 / alpha);
  return 1.7 * std::sqrt(num / static_cast<double>(t));
}

double mmd_kappa(std::int64_t t, double alpha) {
  if (t < 1) return kInf;
  const double m = log2_floor_term(t);
  const double num =
      std::log(m * m * M_PI * M_PI / 6.0) + std::log(4.0 / alpha);
  return std::sqrt(num / static_cast<double>(t));
}

double mmd_gamma(std::int64_t t, double alpha) {
  if (t < 1) return kInf;
  const double m = log2_floor_term(t);
  const double inner = std::log(3.54 * std::exp(1.0) * m * m * m) + std::log(2.0 / alpha);
  return 4.0 * std::sqrt(2.0) / std::sqrt(static_cast<double>(t)) *
         (1.0 + std::sqrt(inner));
}

double mmd_width(std::int64_t t, double alpha) {
  return mmd_gamma(t, alpha) + 2.0 * mmd_kappa(t, alpha);
}

Interval apply_sidedness(const Interval& set, Sidedness mode, double theta_min,
                         double theta_max) {
  if (set.empty) return Interval::none();
  switch (mode) {
    case Sidedness::two_sided:
      return set;
    case Sidedness::upper_only:
      return Interval::make(theta_min, std::min(set.upper, theta_max));
    case Sidedness::lower_only:
      return Interval::make(std::max(set.lower, theta_min), theta_max);
  }
  return set;
}

Sidedness mirror(Sidedness mode) {
  switch (mode) {
    case Sidedness::upper_only:
      return Sidedness::lower_only;
    case Sidedness::lower_only:
      return Sidedness::upper_only;
    default:
      return Sidedness::two_sided;
  }
}

Interval GaussianCs::step(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("invalid observation");
  ++n;
  sum += x;
  return current();
}

Interval GaussianCs::current() const {
  if (n < 1) return Interval::whole();
  const double w = gaussian_width(n, alpha);
  if (w == kInf) return Interval::whole();
  const double mean = sum / static_cast<double>(n);
  return Interval::make(mean - w / 2.0, mean + w / 2.0);
}

Interval EbCs::step(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("observation out of support");
  const double t = static_cast<double>(n + 1);
  const double sigma2_prev = var_acc / t;  // sigma2 after n = t-1 steps
  const double mu_prev = mu_hat;
  const double big_l = std::log(2.0 / alpha);
  const double lam = std::min(
      0.5, std::sqrt(2.0 * big_l / (sigma2_prev * t * std::log(t + 1.0))));
  const double v = 4.0 * (x - mu_prev) * (x - mu_prev);
  lambda_sum += lam;
  weighted_sum += lam * x;
  vpsi_sum += v * psi_e(lam);
  ++n;
  sum += x;
  mu_hat = (0.5 + sum) / static_cast<double>(n + 1);
  var_acc += (x - mu_hat) * (x - mu_hat);
  return current();
}

Interval EbCs::current() const {
  if (n < 1) return Interval::make(0.0, 1.0);
  const double big_l = std::log(2.0 / alpha);
  const double theta = weighted_sum / lambda_sum;
  const double w = (big_l + vpsi_sum) / lambda_sum;
  return Interval::make(theta - w, theta + w).clip(0.0, 1.0);
}

CdfBand KsCs::step(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("invalid observation");
  samples.insert(std::upper_bound(samples.begin(), samples.end(), x), x);
  return current();
}

CdfBand KsCs::current() const {
  const double w = ks_width(static_cast<std::int64_t>(samples.size()), alpha);
  const double hw = (w == kInf) ? 1.0 : w / 2.0;
  return CdfBand::from_sorted(samples, hw);
}

double rbf_kernel(const std::vector<double>& u, const std::vector<double>& v,
                  double bandwidth) {
  if (u.size() != v.size()) throw std::invalid_argument("dimension mismatch");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  double d2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    d2 += d * d;
  }
  return std::exp(-d2 / (2.0 * bandwidth * bandwidth));
}

double mmd_estimate(const std::vector<std::vector<double>>& u_samples,
                    const std::vector<std::vector<double>>& v_samples,
                    const KernelSpec& kernel) {
  const std::size_t t = u_samples.size();
  if (t != v_samples.size()) throw std::invalid_argument("mismatched sample counts");
  if (t == 0) throw std::invalid_argument("empty samples");
  double suu = 0.0, svv = 0.0, suv = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < t; ++j) {
      suu += rbf_kernel(u_samples[i], u_samples[j], kernel.bandwidth);
      svv += rbf_kernel(v_samples[i], v_samples[j], kernel.bandwidth);
      suv += rbf_kernel(u_samples[i], v_samples[j], kernel.bandwidth);
    }
  }
  const double tt = static_cast<double>(t) * static_cast<double>(t);
  return std::sqrt(std::max(0.0, (suu + svv - 2.0 * suv) / tt));
}

MmdCs::MmdCs(double alpha)
    : alpha_(alpha), auto_bandwidth_(true), frozen_(false) {}

MmdCs::MmdCs(double alpha, const KernelSpec& kernel)
    : alpha_(alpha), kernel_(kernel), auto_bandwidth_(false), frozen_(true) {
  if (!(kernel.bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
}

void MmdCs::ingest(std::size_t t) {
  const auto& ut = us_[t - 1];
  const auto& vt = vs_[t - 1];
  const double bw = kernel_.bandwidth;
  double su = 0.0, sv = 0.0, suv_row = 0.0, suv_col = 0.0;
  for (std::size_t i = 0; i + 1 < t; ++i) {
    const double ku = rbf_kernel(ut, us_[i], bw);
    const double kv = rbf_kernel(vt, vs_[i], bw);
    const double kuv = rbf_kernel(ut, vs_[i], bw);
    const double kvu = rbf_kernel(us_[i], vt, bw);
    c_uu_[i] += ku;
    c_vv_[i] += kv;
    d_uv_[i] += kuv + kvu;
    su += ku;
    sv += kv;
    suv_row += kuv;
    suv_col += kvu;
  }
  const double kdiag = rbf_kernel(ut, vt, bw);
  c_uu_.push_back(su + 1.0);
  c_vv_.push_back(sv + 1.0);
  d_uv_.push_back(suv_row + suv_col + 2.0 * kdiag);
  const double puu = q_uu_.empty() ? 0.0 : q_uu_.back();
  const double pvv = q_vv_.empty() ? 0.0 : q_vv_.back();
  const double puv = q_uv_.empty() ? 0.0 : q_uv_.back();
  q_uu_.push_back(puu + 2.0 * su + 1.0);
  q_vv_.push_back(pvv + 2.0 * sv + 1.0);
  q_uv_.push_back(puv + suv_row + suv_col + kdiag);
}

void MmdCs::rebuild() {
  q_uu_.clear();
  q_vv_.clear();
  q_uv_.clear();
  c_uu_.clear();
  c_vv_.clear();
  d_uv_.clear();
  for (std::size_t t = 1; t <= us_.size(); ++t) ingest(t);
}

Interval MmdCs::step(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size()) throw std::invalid_argument("dimension mismatch");
  if (n_ > 0 && u.size() != us_.front().size())
    throw std::invalid_argument("dimension mismatch");
  us_.push_back(u);
  vs_.push_back(v);
  ++n_;
  if (auto_bandwidth_ && !frozen_) {
    const std::size_t m = std::min<std::size_t>(us_.size(), 100);
    std::vector<double> d2s;
    d2s.reserve(m * (2 * m - 1));
    std::vector<const std::vector<double>*> pooled;
    pooled.reserve(2 * m);
    for (std::size_t i = 0; i < m; ++i) pooled.push_back(&us_[i]);
    for (std::size_t i = 0; i < m; ++i) pooled.push_back(&vs_[i]);
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      for (std::size_t j = i + 1; j < pooled.size(); ++j) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < pooled[i]->size(); ++k) {
          const double d = (*pooled[i])[k] - (*pooled[j])[k];
          d2 += d * d;
        }
        d2s.push_back(d2);
      }
    }
    double bw = 1.0;
    if (!d2s.empty()) {
      const std::size_t mid = d2s.size() / 2;
      std::nth_element(d2s.begin(), d2s.begin() + mid, d2s.end());
      const double med = std::sqrt(d2s[mid]);
      if (med > 0.0) bw = med;
    }
    kernel_.bandwidth = bw;
    if (us_.size() >= 100) frozen_ = true;
    rebuild();
  } else {
    ingest(static_cast<std::size_t>(n_));
  }
  return current();
}

double MmdCs::estimate_prefix(std::int64_t t) const {
  if (t < 1 || t > n_) throw std::invalid_argument("prefix out of range");
  const double tt = static_cast<double>(t) * static_cast<double>(t);
  const double sq = (q_uu_[t - 1] + q_vv_[t - 1] - 2.0 * q_uv_[t - 1]) / tt;
  return std::sqrt(std::max(0.0, sq));
}

double MmdCs::estimate() const { return estimate_prefix(n_); }

Interval MmdCs::current() const {
  if (n_ < 1) return Interval::make(0.0, kInf);
  const double m = estimate();
  return Interval::make(std::max(0.0, m - mmd_gamma(n_, alpha_)),
                        m + 2.0 * mmd_kappa(n_, alpha_));
}

MmdCs::SuffixScan MmdCs::suffix_scan() const {
  SuffixScan s;
  s.n = n_;
  s.q_uu = q_uu_;
  s.q_vv = q_vv_;
  s.q_uv = q_uv_;
  const std::size_t n = static_cast<std::size_t>(n_);
  s.ccum_uu.resize(n + 1, 0.0);
  s.ccum_vv.resize(n + 1, 0.0);
  s.ccum_uv.resize(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    s.ccum_uu[i + 1] = s.ccum_uu[i] + c_uu_[i];
    s.ccum_vv[i + 1] = s.ccum_vv[i] + c_vv_[i];
    s.ccum_uv[i + 1] = s.ccum_uv[i] + d_uv_[i];
  }
  return s;
}

double MmdCs::SuffixScan::mmd(std::int64_t a) const {
  if (a < 1 || a > n) throw std::invalid_argument("window out of range");
  const double total_uu = q_uu[n - 1];
  const double total_vv = q_vv[n - 1];
  const double total_uv = q_uv[n - 1];
  const double head_uu = (a >= 2) ? q_uu[a - 2] : 0.0;
  const double head_vv = (a >= 2) ? q_vv[a - 2] : 0.0;
  const double head_uv = (a >= 2) ? q_uv[a - 2] : 0.0;
  const double t_uu = total_uu - 2.0 * ccum_uu[a - 1] + head_uu;
  const double t_vv = total_vv - 2.0 * ccum_vv[a - 1] + head_vv;
  const double t_uv = total_uv - ccum_uv[a - 1] + head_uv;
  const double s = static_cast<double>(n - a + 1);
  const double sq = (t_uu + t_vv - 2.0 * t_uv) / (s * s);
  return std::sqrt(std::max(0.0, sq));
}

}  // namespace scd
