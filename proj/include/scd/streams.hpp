// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
#ifndef SCD_STREAMS_HPP
#define SCD_STREAMS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace scd {

// Seed splitting: trial seeds derive from (base seed, trial index) so
// parallel trials replay identically regardless of scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) {
  return splitmix64(base_seed + 0x9E3779B97F4A7C15ULL * (trial_index + 1));
}

struct Observation {
  bool is_pair = false;
  double x = 0.0;
  std::vector<double> u, v;

  static Observation scalar(double value) {
    Observation o;
    o.x = value;
    return o;
  }
  static Observation pair(std::vector<double> u_, std::vector<double> v_) {
    Observation o;
    o.is_pair = true;
    o.u = std::move(u_);
    o.v = std::move(v_);
    return o;
  }
};

enum class StreamFamily {
  gaussian_mean,
  bounded_mixture,
  t_location_scale,
  paired_mvn,
  classifier_risk,
  file,
};

constexpr std::int64_t kNoChange = INT64_MAX;

struct StreamSpec {
  StreamFamily family = StreamFamily::gaussian_mean;
  double theta0 = 0.0;
  double theta1 = 0.0;
  std::int64_t change_at = kNoChange;  // index of the last pre-change draw
  std::int64_t horizon = 0;
  std::uint64_t seed = 1;
  std::uint64_t cov_seed = 0;  // paired_mvn covariance; 0 = derive from seed
  std::string path;            // family == file
};

// One draw from P_theta = (1-theta) Uniform[0,theta] + theta Uniform[theta,1];
// exact mean theta.
double bounded_mixture_sample(double theta, std::mt19937_64& rng);

std::vector<Observation> generate(const StreamSpec& spec);

// Observations from newline-delimited scalars or "u1,..|v1,.." pair rows.
std::vector<Observation> read_stream(std::istream& in);
Observation parse_observation_line(const std::string& line, std::size_t line_no);

double normal_cdf(double x);
double normal_quantile(double p);
double t3_cdf(double x);  // Student t, 3 degrees of freedom
inline double t3_cdf(double x, double loc, double scale) {
  return t3_cdf((x - loc) / scale);
}

// sup_x |F0(x) - F1(x)| on an adaptive grid, accurate to ~1e-4
double ks_distance_numeric(const std::function<double(double)>& f0,
                           const std::function<double(double)>& f1);

// Post-change t3 location delta (scale fixed at 2) whose KS distance from
// the standard t3 equals `target`.
double t3_shift_for_ks(double target);

// Classifier-risk stream helpers: population risk is Phi(-cos gamma).
double risk_for_rotation(double gamma);
double rotation_for_risk_gap(double delta);

}  // namespace scd

#endif
