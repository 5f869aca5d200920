#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "gtmc/gtmc.hpp"

namespace gtmc::testing {

inline std::string fixture(const std::string& name) {
  std::ifstream in(std::string(GTMC_FIXTURES) + "/" + name, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline MeasurementMatrix worked_m() { return io::parse_measurement_matrix(fixture("worked_m.txt")); }
inline MissingMatrix worked_missing() { return io::parse_missing_matrix(fixture("worked_missing.txt")); }

/// 1-based item list to a length-n input vector.
inline InputVector items(std::size_t n, std::initializer_list<std::size_t> one_based) {
  InputVector x(n);
  for (auto j : one_based) x.set(j - 1);
  return x;
}

inline SampleSet samples_of(const BitMatrix& m, const std::vector<InputVector>& xs) {
  SampleSet s;
  for (const auto& x : xs) {
    s.inputs.push_back(x);
    s.outcomes.push_back(test_outcome(m, x));
  }
  return s;
}

/// |observed - expected| within k binomial standard deviations.
inline bool within_binomial(double successes, double trials, double prob, double k = 3.0) {
  const double sd = std::sqrt(trials * prob * (1 - prob));
  return std::abs(successes - trials * prob) <= k * sd;
}

}  // namespace gtmc::testing

namespace gtmc::testing {

struct Instance {
  MeasurementMatrix m;
  Erasure er;
  SampleSet samples;
};

/// Random end-to-end instance: M ~ Bernoulli(p), erasures with probability q,
/// s distinct weight-d samples.
inline Instance random_instance(RngStream& r, std::size_t max_n, std::size_t max_t) {
  const std::size_t n = 2 + r.below(max_n - 1);
  const std::size_t t = 1 + r.below(max_t);
  const std::size_t d = 1 + r.below(std::min<std::size_t>(4, n));
  const double p = 0.05 + 0.6 * r.uniform();
  const double q = 0.05 + 0.5 * r.uniform();
  Instance in;
  in.m = generate_matrix(t, n, p, r);
  in.er = erase_matrix(in.m, q, r);
  const auto universe = choose_saturating(n, d);
  const std::size_t s = 1 + r.below(std::min<std::uint64_t>(universe, 40));
  in.samples = sample_pairs(in.m, d, s, r);
  return in;
}

}  // namespace gtmc::testing
