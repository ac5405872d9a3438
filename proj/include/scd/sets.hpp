// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
#ifndef SCD_SETS_HPP
#define SCD_SETS_HPP

#include <cstddef>
#include <limits>
#include <vector>

namespace scd {

// Closed interval with an explicit empty flag. Emptiness is a flag, never a
// NaN sentinel, so the detectors' stopping test is exact.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool empty = true;

  static Interval make(double lo, double hi) {
    Interval r;
    r.lower = lo;
    r.upper = hi;
    r.empty = !(lo <= hi);
    return r;
  }
  static Interval whole() {
    return make(-std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity());
  }
  static Interval none() { return Interval{}; }

  bool bounded() const {
    return !empty && lower > -std::numeric_limits<double>::infinity() &&
           upper < std::numeric_limits<double>::infinity();
  }
  bool contains(double x) const { return !empty && lower <= x && x <= upper; }
  Interval clip(double lo, double hi) const;
};

Interval intersect(const Interval& a, const Interval& b);

// Infimum distance between two nonempty intervals; 0 iff they intersect.
double separation(const Interval& a, const Interval& b);

// max_{x in a, y in b} |x - y|; requires both nonempty and bounded.
double span(const Interval& a, const Interval& b);

// Fold of interval-valued confidence sets: C~_n = C_1 ∩ ... ∩ C_n.
struct RunningIntersection {
  Interval current = Interval::whole();
  std::size_t count = 0;

  void fold(const Interval& s) {
    current = intersect(current, s);
    ++count;
  }
};

// Kolmogorov-Smirnov band around an empirical CDF. Envelopes are
// lower = max(F - w/2, 0), upper = min(F + w/2, 1).
struct CdfBand {
  std::vector<double> breakpoints;    // sorted, unique
  std::vector<double> empirical_cdf;  // nondecreasing, last value 1
  double half_width = 0.0;

  // Builds breakpoints/heights from a sorted sample vector (duplicates merged).
  static CdfBand from_sorted(const std::vector<double>& sorted, double half_width);

  double lower_at(std::size_t i) const;
  double upper_at(std::size_t i) const;
  bool vacuous() const { return half_width >= 1.0; }
};

// Running intersection of CdfBands: pointwise max of lowers / min of uppers
// on the merged breakpoint grid, step-function (right-continuous) semantics.
// pre_upper is the band constraint left of the first breakpoint, where every
// empirical CDF is 0 (the lower envelope there is always 0).
struct BandEnvelope {
  std::vector<double> breakpoints;
  std::vector<double> lower;
  std::vector<double> upper;
  double pre_upper = 1.0;

  static BandEnvelope vacuous() { return BandEnvelope{}; }
  static BandEnvelope from_band(const CdfBand& band);
  std::size_t size() const { return breakpoints.size(); }
};

BandEnvelope fold_band(const BandEnvelope& env, const CdfBand& band);
BandEnvelope fold_envelopes(const BandEnvelope& a, const BandEnvelope& b);

// True iff some nondecreasing F with values in [0,1] fits inside the
// envelope; decided by cummax(lower) <= upper at every breakpoint.
bool band_feasible(const BandEnvelope& env);

// KS-set distance between two feasible envelopes: how far the monotone
// regularization of one's lower envelope pokes above the other's upper.
double band_separation(const BandEnvelope& a, const BandEnvelope& b);

// max_{F in a, G in b} d_KS(F, G) for feasible envelopes.
double band_span(const BandEnvelope& a, const BandEnvelope& b);

}  // namespace scd

#endif
