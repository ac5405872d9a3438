// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
#include "scd/sets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scd {

Interval Interval::clip(double lo, double hi) const {
  if (empty) return none();
  return make(std::max(lower, lo), std::min(upper, hi));
}

Interval intersect(const Interval& a, const Interval& b) {
  if (a.empty || b.empty) return Interval::none();
  return Interval::make(std::max(a.lower, b.lower), std::min(a.upper, b.upper));
}

double separation(const Interval& a, const Interval& b) {
  if (a.empty || b.empty) throw std::invalid_argument("empty set has no separation");
  return std::max({b.lower - a.upper, a.lower - b.upper, 0.0});
}

double span(const Interval& a, const Interval& b) {
  if (a.empty || b.empty) throw std::invalid_argument("span of empty set");
  if (!a.bounded() || !b.bounded()) throw std::invalid_argument("span of unbounded set");
  return std::max(std::abs(a.upper - b.lower), std::abs(b.upper - a.lower));
}

CdfBand CdfBand::from_sorted(const std::vector<double>& sorted, double half_width) {
  CdfBand band;
  band.half_width = half_width;
  const std::size_t n = sorted.size();
  band.breakpoints.reserve(n);
  band.empirical_cdf.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // merge duplicates: height at a value is the count of samples <= it
    if (i + 1 < n && sorted[i + 1] == sorted[i]) continue;
    band.breakpoints.push_back(sorted[i]);
    band.empirical_cdf.push_back(static_cast<double>(i + 1) / static_cast<double>(n));
  }
  return band;
}

double CdfBand::lower_at(std::size_t i) const {
  return std::max(empirical_cdf[i] - half_width, 0.0);
}

double CdfBand::upper_at(std::size_t i) const {
  return std::min(empirical_cdf[i] + half_width, 1.0);
}

BandEnvelope BandEnvelope::from_band(const CdfBand& band) {
  BandEnvelope env;
  env.pre_upper = std::min(band.half_width, 1.0);
  const std::size_t n = band.breakpoints.size();
  env.breakpoints.reserve(n);
  env.lower.reserve(n);
  env.upper.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    env.breakpoints.push_back(band.breakpoints[i]);
    env.lower.push_back(band.lower_at(i));
    env.upper.push_back(band.upper_at(i));
  }
  return env;
}

BandEnvelope fold_envelopes(const BandEnvelope& a, const BandEnvelope& b) {
  BandEnvelope out;
  out.pre_upper = std::min(a.pre_upper, b.pre_upper);
  const std::size_t na = a.size(), nb = b.size();
  out.breakpoints.reserve(na + nb);
  out.lower.reserve(na + nb);
  out.upper.reserve(na + nb);
  std::size_t i = 0, j = 0;
  // step-function values carried from the last breakpoint of each input
  double la = 0.0, ua = a.pre_upper;
  double lb = 0.0, ub = b.pre_upper;
  while (i < na || j < nb) {
    double x;
    if (j >= nb || (i < na && a.breakpoints[i] <= b.breakpoints[j])) {
      x = a.breakpoints[i];
    } else {
      x = b.breakpoints[j];
    }
    if (i < na && a.breakpoints[i] == x) {
      la = a.lower[i];
      ua = a.upper[i];
      ++i;
    }
    if (j < nb && b.breakpoints[j] == x) {
      lb = b.lower[j];
      ub = b.upper[j];
      ++j;
    }
    out.breakpoints.push_back(x);
    out.lower.push_back(std::max(la, lb));
    out.upper.push_back(std::min(ua, ub));
  }
  return out;
}

BandEnvelope fold_band(const BandEnvelope& env, const CdfBand& band) {
  return fold_envelopes(env, BandEnvelope::from_band(band));
}

bool band_feasible(const BandEnvelope& env) {
  double running = 0.0;
  for (std::size_t i = 0; i < env.size(); ++i) {
    running = std::max(running, env.lower[i]);
    if (running > env.upper[i]) return false;
  }
  return true;
}

namespace {

// Monotone regularization on a shared grid: lowers get a running max, uppers
// a reverse running min. Valid CDFs in the band are exactly those between
// the regularized envelopes.
struct Regularized {
  std::vector<double> lower;
  std::vector<double> upper;
  double pre_upper;
};

Regularized regularize_on(const BandEnvelope& e, const std::vector<double>& grid) {
  Regularized r;
  const std::size_t n = grid.size();
  r.lower.resize(n);
  r.upper.resize(n);
  std::size_t k = 0;
  double lv = 0.0, uv = e.pre_upper;
  for (std::size_t i = 0; i < n; ++i) {
    while (k < e.size() && e.breakpoints[k] <= grid[i]) {
      lv = e.lower[k];
      uv = e.upper[k];
      ++k;
    }
    r.lower[i] = lv;
    r.upper[i] = uv;
  }
  double run = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    run = std::max(run, r.lower[i]);
    r.lower[i] = run;
  }
  run = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    run = std::min(run, r.upper[i]);
    r.upper[i] = run;
  }
  r.pre_upper = std::min(e.pre_upper, n > 0 ? r.upper[0] : 1.0);
  return r;
}

std::vector<double> merged_grid(const BandEnvelope& a, const BandEnvelope& b) {
  std::vector<double> grid;
  grid.reserve(a.size() + b.size());
  std::merge(a.breakpoints.begin(), a.breakpoints.end(), b.breakpoints.begin(),
             b.breakpoints.end(), std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

double band_separation(const BandEnvelope& a, const BandEnvelope& b) {
  const std::vector<double> grid = merged_grid(a, b);
  const Regularized ra = regularize_on(a, grid);
  const Regularized rb = regularize_on(b, grid);
  double sep = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sep = std::max(sep, ra.lower[i] - rb.upper[i]);
    sep = std::max(sep, rb.lower[i] - ra.upper[i]);
  }
  return sep;
}

double band_span(const BandEnvelope& a, const BandEnvelope& b) {
  const std::vector<double> grid = merged_grid(a, b);
  const Regularized ra = regularize_on(a, grid);
  const Regularized rb = regularize_on(b, grid);
  // the sup can sit left of the first breakpoint, where lowers are 0
  double sp = std::max(ra.pre_upper, rb.pre_upper);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sp = std::max(sp, ra.upper[i] - rb.lower[i]);
    sp = std::max(sp, rb.upper[i] - ra.lower[i]);
  }
  return std::min(std::max(sp, 0.0), 1.0);
}

}  // namespace scd
