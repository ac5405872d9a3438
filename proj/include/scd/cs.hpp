// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
#ifndef SCD_CS_HPP
#define SCD_CS_HPP

#include <cstdint>
#include <vector>

#include "scd/sets.hpp"

namespace scd {

// Closed-form widths. All logarithms are natural; where an inner log-log
// would be undefined or negative the width is +inf (vacuous set).
double gaussian_width(std::int64_t t, double alpha);
double ks_width(std::int64_t t, double alpha);
double mmd_kappa(std::int64_t t, double alpha);
double mmd_gamma(std::int64_t t, double alpha);
double mmd_width(std::int64_t t, double alpha);  // gamma_t + 2*kappa_t

enum class Sidedness { two_sided, upper_only, lower_only };

// Relax one side of a confidence set out to the parameter-space boundary.
Interval apply_sidedness(const Interval& set, Sidedness mode, double theta_min,
                         double theta_max);
Sidedness mirror(Sidedness mode);

// Sub-Gaussian mean CS: interval X̄_t ± w_t/2 with data-free width.
struct GaussianCs {
  double alpha;
  std::int64_t n = 0;
  double sum = 0.0;

  explicit GaussianCs(double alpha_) : alpha(alpha_) {}
  Interval step(double x);
  Interval current() const;
};

// Empirical-Bernstein CS for means of [0,1]-valued observations.
// Plug-ins are strictly predictable: lambda_t uses sigma2 from step t-1 and
// v_t uses the mean from step t-1. Interval radius is the full w_t.
struct EbCs {
  double alpha;
  std::int64_t n = 0;
  double sum = 0.0;
  double mu_hat = 0.5;     // (1/2 + sum) / (n+1)
  double var_acc = 0.25;   // 1/4 + sum of (x_i - mu_hat_i)^2
  double lambda_sum = 0.0;
  double weighted_sum = 0.0;  // sum of lambda_i * x_i
  double vpsi_sum = 0.0;      // sum of v_i * Psi_E(lambda_i)

  explicit EbCs(double alpha_) : alpha(alpha_) {}
  Interval step(double x);
  Interval current() const;
  double sigma2() const { return var_acc / static_cast<double>(n + 1); }
};

// Kolmogorov-Smirnov CDF band CS.
struct KsCs {
  double alpha;
  std::vector<double> samples;  // kept sorted

  explicit KsCs(double alpha_) : alpha(alpha_) {}
  CdfBand step(double x);
  CdfBand current() const;
};

struct KernelSpec {
  double bandwidth = 1.0;
};

// exp(-||u-v||^2 / (2 bandwidth^2))
double rbf_kernel(const std::vector<double>& u, const std::vector<double>& v,
                  double bandwidth);

// Plug-in MMD of the two empirical measures (V-statistic, diagonal included).
double mmd_estimate(const std::vector<std::vector<double>>& u_samples,
                    const std::vector<std::vector<double>>& v_samples,
                    const KernelSpec& kernel);

// Paired-sample MMD CS: interval [max(0, m̂_t - gamma_t), m̂_t + 2 kappa_t].
// Gram sums are maintained incrementally in O(t) per step; per-index row sums
// additionally support O(1) plug-in MMD over any suffix window (used by the
// detectors' backward rebuilds).
class MmdCs {
 public:
  explicit MmdCs(double alpha);              // median-heuristic bandwidth,
                                             // frozen after 100 pooled pairs
  MmdCs(double alpha, const KernelSpec& kernel);

  Interval step(const std::vector<double>& u, const std::vector<double>& v);
  Interval current() const;
  std::int64_t n() const { return n_; }
  double alpha() const { return alpha_; }
  double estimate() const;  // plug-in MMD over all n pairs
  double estimate_prefix(std::int64_t t) const;
  double bandwidth() const { return kernel_.bandwidth; }

  struct SuffixScan {
    std::int64_t n = 0;
    std::vector<double> q_uu, q_vv, q_uv;
    std::vector<double> ccum_uu, ccum_vv, ccum_uv;
    double mmd(std::int64_t a) const;  // plug-in MMD over pairs a..n, 1-based
  };
  SuffixScan suffix_scan() const;

 private:
  void ingest(std::size_t t);  // gram updates for pair index t (1-based)
  void rebuild();

  double alpha_;
  KernelSpec kernel_;
  bool auto_bandwidth_;
  bool frozen_;
  std::int64_t n_ = 0;
  std::vector<std::vector<double>> us_, vs_;
  std::vector<double> q_uu_, q_vv_, q_uv_;  // prefix gram sums per t
  std::vector<double> c_uu_, c_vv_, d_uv_;  // row/col sums vs all current samples
};

}  // namespace scd

#endif
