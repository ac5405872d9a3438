// Copyright 2026 the scd authors
// SPDX-License-Identifier: Apache-2.0
#include "scd/streams.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace scd {

double bounded_mixture_sample(double theta, std::mt19937_64& rng) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("mixture parameter outside [0,1]");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double w = unif(rng);
  if (w < 1.0 - theta) return theta * unif(rng);
  return theta + (1.0 - theta) * unif(rng);
}

namespace {

std::vector<Observation> gen_gaussian(const StreamSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<Observation> out;
  out.reserve(spec.horizon);
  for (std::int64_t t = 1; t <= spec.horizon; ++t) {
    const double mean = (t <= spec.change_at) ? spec.theta0 : spec.theta1;
    out.push_back(Observation::scalar(mean + z(rng)));
  }
  return out;
}

std::vector<Observation> gen_bounded(const StreamSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::vector<Observation> out;
  out.reserve(spec.horizon);
  for (std::int64_t t = 1; t <= spec.horizon; ++t) {
    const double theta = (t <= spec.change_at) ? spec.theta0 : spec.theta1;
    out.push_back(Observation::scalar(bounded_mixture_sample(theta, rng)));
  }
  return out;
}

std::vector<Observation> gen_t_stream(const StreamSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::student_t_distribution<double> t3(3.0);
  std::vector<Observation> out;
  out.reserve(spec.horizon);
  for (std::int64_t t = 1; t <= spec.horizon; ++t) {
    const double draw = t3(rng);
    if (t <= spec.change_at) {
      out.push_back(Observation::scalar(draw));
    } else {
      out.push_back(Observation::scalar(spec.theta1 + 2.0 * draw));
    }
  }
  return out;
}

std::vector<Observation> gen_paired_mvn(const StreamSpec& spec) {
  constexpr std::size_t p = 5;
  const std::uint64_t cov_seed = spec.cov_seed ? spec.cov_seed : spec.seed;
  std::mt19937_64 cov_rng(cov_seed);
  std::uniform_real_distribution<double> unif(0.5, 2.0);
  std::vector<double> cov_diag(p);
  for (auto& c : cov_diag) c = unif(cov_rng);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<Observation> out;
  out.reserve(spec.horizon);
  for (std::int64_t t = 1; t <= spec.horizon; ++t) {
    std::vector<double> u(p), v(p);
    for (auto& c : u) c = z(rng);
    if (t <= spec.change_at) {
      for (auto& c : v) c = z(rng);
    } else {
      for (std::size_t i = 0; i < p; ++i)
        v[i] = spec.theta1 + std::sqrt(cov_diag[i]) * z(rng);
    }
    out.push_back(Observation::pair(std::move(u), std::move(v)));
  }
  return out;
}

std::vector<Observation> gen_risk_stream(const StreamSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::bernoulli_distribution label(0.5);
  std::vector<Observation> out;
  out.reserve(spec.horizon);
  for (std::int64_t t = 1; t <= spec.horizon; ++t) {
    const double gamma = (t <= spec.change_at) ? 0.0 : spec.theta1;
    const int ell = label(rng) ? 1 : 0;
    // feature mean (2L-1)[1,0] rotated by gamma; the fixed classifier
    // h*(z) = 1{z_1 >= 0} only sees the first coordinate
    const double z1 = (2 * ell - 1) * std::cos(gamma) + z(rng);
    const int h = (z1 >= 0.0) ? 1 : 0;
    out.push_back(Observation::scalar(h != ell ? 1.0 : 0.0));
  }
  return out;
}

}  // namespace

std::vector<Observation> generate(const StreamSpec& spec) {
  if (spec.family != StreamFamily::file && spec.horizon < 0)
    throw std::invalid_argument("negative horizon");
  switch (spec.family) {
    case StreamFamily::gaussian_mean:
      return gen_gaussian(spec);
    case StreamFamily::bounded_mixture:
      return gen_bounded(spec);
    case StreamFamily::t_location_scale:
      return gen_t_stream(spec);
    case StreamFamily::paired_mvn:
      return gen_paired_mvn(spec);
    case StreamFamily::classifier_risk:
      return gen_risk_stream(spec);
    case StreamFamily::file: {
      std::ifstream in(spec.path);
      if (!in) throw std::runtime_error("cannot open stream file: " + spec.path);
      return read_stream(in);
    }
  }
  throw std::invalid_argument("unknown stream family");
}

namespace {

double parse_double(const std::string& tok, std::size_t line_no) {
  std::size_t pos = 0;
  double val;
  try {
    val = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": unparsable value '" + tok + "'");
  }
  while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
  if (pos != tok.size())
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": unparsable value '" + tok + "'");
  return val;
}

std::vector<double> parse_vector(const std::string& text, std::size_t line_no) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_double(tok, line_no));
  if (out.empty())
    throw std::runtime_error("line " + std::to_string(line_no) + ": empty vector");
  return out;
}

}  // namespace

Observation parse_observation_line(const std::string& line, std::size_t line_no) {
  const std::size_t bar = line.find('|');
  if (bar == std::string::npos)
    return Observation::scalar(parse_double(line, line_no));
  std::vector<double> u = parse_vector(line.substr(0, bar), line_no);
  std::vector<double> v = parse_vector(line.substr(bar + 1), line_no);
  if (u.size() != v.size())
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": u/v dimension mismatch");
  return Observation::pair(std::move(u), std::move(v));
}

std::vector<Observation> read_stream(std::istream& in) {
  std::vector<Observation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    out.push_back(parse_observation_line(line, line_no));
  }
  if (out.empty()) throw std::runtime_error("empty input stream");
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile outside (0,1)");
  double lo = -12.0, hi = 12.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double t3_cdf(double x) {
  const double s = x / std::sqrt(3.0);
  return 0.5 + (s / (1.0 + x * x / 3.0) + std::atan(s)) / M_PI;
}

double ks_distance_numeric(const std::function<double(double)>& f0,
                           const std::function<double(double)>& f1) {
  double lo = -60.0, hi = 60.0;
  double best_x = 0.0, best = 0.0;
  for (int round = 0; round < 5; ++round) {
    const int pts = (round == 0) ? 2400 : 200;
    const double step = (hi - lo) / pts;
    for (int i = 0; i <= pts; ++i) {
      const double x = lo + i * step;
      const double d = std::abs(f0(x) - f1(x));
      if (d > best) {
        best = d;
        best_x = x;
      }
    }
    lo = best_x - step;
    hi = best_x + step;
  }
  return std::min(best, 1.0);
}

double t3_shift_for_ks(double target) {
  auto f0 = [](double x) { return t3_cdf(x); };
  auto gap = [&](double delta) {
    auto f1 = [delta](double x) { return t3_cdf(x, delta, 2.0); };
    return ks_distance_numeric(f0, f1);
  };
  if (!(target > gap(0.0)))
    throw std::invalid_argument("KS target below the scale-change floor");
  double lo = 0.0, hi = 1.0;
  while (gap(hi) < target) {
    hi *= 2.0;
    if (hi > 1e4) throw std::invalid_argument("KS target unreachable");
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double risk_for_rotation(double gamma) { return normal_cdf(-std::cos(gamma)); }

double rotation_for_risk_gap(double delta) {
  const double target = normal_cdf(-1.0) + delta;
  if (!(target > normal_cdf(-1.0) && target < 1.0))
    throw std::invalid_argument("risk gap out of range");
  const double q = normal_quantile(target);
  if (std::abs(q) > 1.0) throw std::invalid_argument("risk gap out of range");
  return std::acos(-q);
}

}  // namespace scd
