#pragma once

// Closed forms for the expected number of erased-system rows, their bounds,
// and brute-force oracles at enumeration scale.
//
// Notation: a = (1-p)(1-q) is the probability that a cell reads as a known
// zero, b = 1-p+pq the probability that it reads as zero or erased.
// upsilon(u) = a^(2d-2u) * (b^u - a^u) is the probability that two weight-d
// inputs overlapping in u positions form identical informative pairs with
// one random row; upsilon(d) is the probability that a single pair is
// informative.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "gtmc/bits.hpp"
#include "gtmc/error.hpp"
#include "gtmc/gt_core.hpp"

namespace gtmc {

/// Neumaier-compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct RegimeParams {
  std::size_t n = 0;
  std::size_t d = 1;
  double p = 0.0;
  double q = 0.0;
  std::size_t s = 1;

  double a() const noexcept { return (1 - p) * (1 - q); }
  double b() const noexcept { return 1 - p + p * q; }
  bool simple_bound_applies() const noexcept { return n > (d + 1) * (d + 1); }
};

namespace detail {

inline double power(double base, double exponent, bool log_space) {
  if (exponent == 0) return 1.0;
  if (base == 0) return 0.0;
  return log_space ? std::exp(exponent * std::log(base)) : std::pow(base, exponent);
}

inline void check_probabilities(double p, double q) {
  if (!(p >= 0 && p <= 1) || !(q >= 0 && q <= 1)) throw DomainError("p and q must lie in [0, 1]");
}

}  // namespace detail

inline double upsilon(std::size_t u, std::size_t d, double p, double q) {
  if (u > d) throw DomainError("upsilon argument outside [0, d]");
  detail::check_probabilities(p, q);
  const double a = (1 - p) * (1 - q);
  const double b = 1 - p + p * q;
  const bool log_space = d > 50;
  const auto ud = static_cast<double>(u);
  const auto dd = static_cast<double>(d);
  return detail::power(a, 2 * dd - 2 * ud, log_space) *
         (detail::power(b, ud, log_space) - detail::power(a, ud, log_space));
}

/// C(d, i) * C(n-d, d-i): inputs in T_d overlapping a fixed one in i places.
inline double overlap_count(std::size_t n, std::size_t d, std::size_t i) {
  return choose(static_cast<double>(d), static_cast<double>(i)) *
         choose(static_cast<double>(n - d), static_cast<double>(d - i));
}

/// Probability that (x1, row) and (x2, row) are informative and identical.
inline double pr_identical_pair(const InputVector& x1, const InputVector& x2, std::size_t d,
                                double p, double q) {
  if (x1.size() != x2.size()) throw DomainError("inputs differ in length");
  if (x1.count() != d || x2.count() != d) throw DomainError("inputs must both have weight d");
  return upsilon((x1 & x2).count(), d, p, q);
}

/// Expected number of ordered pairs of distinct inputs in T_d that are
/// identical informative pairs for one random row.
inline double phi(std::size_t n, std::size_t d, double p, double q) {
  if (d < 1 || d > n) throw DomainError("phi requires n >= d >= 1");
  CompensatedSum sum;
  for (std::size_t i = 0; i < d; ++i) sum.add(overlap_count(n, d, i) * upsilon(i, d, p, q));
  return choose(static_cast<double>(n), static_cast<double>(d)) * sum.value();
}

/// Sum_i w_i upsilon(i) / (Sum_i w_i * upsilon(d)), i < d, w_i = overlap_count.
inline double omega_ratio(std::size_t d, std::size_t n, double p, double q) {
  if (d < 1 || d > n) throw DomainError("omega requires n >= d >= 1");
  const double top = upsilon(d, d, p, q);
  if (!(top > 0)) throw DomainError("omega undefined when upsilon(d) = 0");
  CompensatedSum num;
  CompensatedSum den;
  for (std::size_t i = 0; i < d; ++i) {
    const double w = overlap_count(n, d, i);
    num.add(w * upsilon(i, d, p, q));
    den.add(w);
  }
  if (!(den.value() > 0)) throw DomainError("omega undefined when T_d has a single element");
  return num.value() / (den.value() * top);
}

enum class BoundsForm { Exact, Simple };

inline const char* to_string(BoundsForm f) noexcept {
  return f == BoundsForm::Exact ? "exact" : "simple";
}

struct BoundsResult {
  double lower = 0.0;
  double upper = 0.0;
  BoundsForm form = BoundsForm::Exact;
  bool vacuous = false;  ///< lower <= 0
};

/// Bounds on E[h|s]/t. upper = s*upsilon(d) in both forms; the exact form
/// subtracts the pairwise term through omega_ratio, the simple form uses
/// the bound omega < a^2 / ((b - a^2) d), valid for n > (d+1)^2.
inline BoundsResult expectation_bounds(const RegimeParams& rp, BoundsForm form) {
  if (rp.d < 1 || rp.d > rp.n) throw DomainError("bounds require n >= d >= 1");
  if (rp.s < 1) throw DomainError("bounds require s >= 1");
  if (form == BoundsForm::Simple && !rp.simple_bound_applies()) {
    throw DomainError("simple bound requires n > (d+1)^2");
  }
  const auto s = static_cast<double>(rp.s);
  const double ups_d = upsilon(rp.d, rp.d, rp.p, rp.q);
  BoundsResult out;
  out.form = form;
  out.upper = s * ups_d;
  if (ups_d == 0 || rp.s == 1) {
    out.lower = out.upper;
  } else if (form == BoundsForm::Exact) {
    out.lower = s * ups_d * (1 - (s - 1) / 2 * omega_ratio(rp.d, rp.n, rp.p, rp.q));
  } else {
    const double a = rp.a();
    const double b = rp.b();
    out.lower = s * ups_d * (1 - (s - 1) / (2 * static_cast<double>(rp.d)) * (a * a / (b - a * a)));
  }
  out.vacuous = out.lower <= 0;
  return out;
}

/// Pairwise inclusion-exclusion term: C(N-2, s-2) * phi / (2 C(N, s)),
/// N = C(n, d).
inline double pairwise_term(const RegimeParams& rp) {
  if (rp.s < 2) return 0.0;
  const double big_n = choose(static_cast<double>(rp.n), static_cast<double>(rp.d));
  const auto s = static_cast<double>(rp.s);
  return s * (s - 1) / (2 * big_n * (big_n - 1)) * phi(rp.n, rp.d, rp.p, rp.q);
}

// ---------------------------------------------------------------------------
// Enumeration oracles

struct OracleLimits {
  std::uint64_t max_universe = 64;          ///< C(n, d)
  std::uint64_t max_row_states = 10'000'000;  ///< 3^n
};

namespace detail {

/// Calls f(erased_mask, one_mask, probability) for every one of the 3^n
/// states of a single row (columns as bits of the masks).
template <class F>
void for_each_row_state(std::size_t n, double p, double q, F&& f) {
  const double pr_erased = q;
  const double pr_one = p * (1 - q);
  const double pr_zero = (1 - p) * (1 - q);
  struct Frame {
    std::size_t col;
    std::uint32_t erased;
    std::uint32_t ones;
    double weight;
  };
  std::vector<Frame> stack{{0, 0, 0, 1.0}};
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    if (fr.col == n) {
      f(fr.erased, fr.ones, fr.weight);
      continue;
    }
    const std::uint32_t bit = std::uint32_t{1} << fr.col;
    stack.push_back({fr.col + 1, fr.erased, fr.ones | bit, fr.weight * pr_one});
    stack.push_back({fr.col + 1, fr.erased | bit, fr.ones, fr.weight * pr_erased});
    stack.push_back({fr.col + 1, fr.erased, fr.ones, fr.weight * pr_zero});
  }
}

inline std::vector<std::uint32_t> weight_masks(std::size_t n, std::size_t d) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << n); ++m) {
    if (static_cast<std::size_t>(std::popcount(m)) == d) out.push_back(m);
  }
  return out;
}

inline void check_oracle_size(std::size_t n, std::size_t d, std::size_t s,
                              const OracleLimits& limits) {
  if (d < 1 || d > n) throw DomainError("oracle requires n >= d >= 1");
  if (n > 24) throw CapacityExceeded("oracle row enumeration too large");
  const std::uint64_t universe = choose_saturating(n, d);
  if (universe > limits.max_universe) throw CapacityExceeded("C(n, d) above oracle limit");
  std::uint64_t states = 1;
  for (std::size_t k = 0; k < n; ++k) states *= 3;
  if (states > limits.max_row_states) throw CapacityExceeded("3^n above oracle limit");
  if (s < 1) throw DomainError("oracle requires s >= 1");
  if (s > universe) throw InsufficientUniverse("s exceeds C(n, d)");
}

/// Sizes of the classes of identical informative pairs among all of T_d for
/// one row state.
inline void signature_classes(std::span<const std::uint32_t> universe, std::uint32_t erased,
                              std::uint32_t ones, std::vector<std::uint32_t>& scratch,
                              std::vector<std::size_t>& sizes) {
  scratch.clear();
  sizes.clear();
  for (auto x : universe) {
    if ((x & erased) != 0 && (x & ones) == 0) scratch.push_back(x & erased);
  }
  std::ranges::sort(scratch);
  for (std::size_t k = 0; k < scratch.size();) {
    std::size_t e = k;
    while (e < scratch.size() && scratch[e] == scratch[k]) ++e;
    sizes.push_back(e - k);
    k = e;
  }
}

/// Probability that a uniform s-subset of an N-set misses a fixed k-subset.
inline double miss_probability(double big_n, double s, std::size_t k) {
  double pr = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double num = big_n - s - static_cast<double>(j);
    if (num <= 0) return 0.0;
    pr *= num / (big_n - static_cast<double>(j));
  }
  return pr;
}

}  // namespace detail

/// E[omega | s] computed exactly: every row state weighted by its
/// probability, and for each state the expected number of distinct
/// informative signatures hit by a uniform s-subset of T_d (the average over
/// all C(C(n,d), s) subsets, evaluated per class by the hypergeometric miss
/// probability).
inline double exact_expected_rows_oracle(std::size_t n, std::size_t d, double p, double q,
                                         std::size_t s, const OracleLimits& limits = {}) {
  detail::check_probabilities(p, q);
  detail::check_oracle_size(n, d, s, limits);
  const auto universe = detail::weight_masks(n, d);
  const auto big_n = static_cast<double>(universe.size());
  std::vector<std::uint32_t> scratch;
  std::vector<std::size_t> sizes;
  CompensatedSum total;
  detail::for_each_row_state(n, p, q, [&](std::uint32_t erased, std::uint32_t ones, double w) {
    if (w == 0) return;
    detail::signature_classes(universe, erased, ones, scratch, sizes);
    double hit = 0;
    for (auto k : sizes) hit += 1 - detail::miss_probability(big_n, static_cast<double>(s), k);
    total.add(w * hit);
  });
  return total.value();
}

/// The three inclusion-exclusion terms of E[omega | s], each evaluated by
/// enumeration: term c is C(N-c, s-c)/C(N, s) times the expected number of
/// c-subsets of T_d that are pairwise identical informative pairs.
/// value = first - second + rest.
struct InclusionExclusionTerms {
  double first = 0;   ///< equals s * upsilon(d)
  double second = 0;  ///< equals pairwise_term
  double rest = 0;    ///< alternating sum over c >= 3
  double value() const noexcept { return first - second + rest; }
};

inline InclusionExclusionTerms inclusion_exclusion_terms(std::size_t n, std::size_t d, double p,
                                                         double q, std::size_t s,
                                                         const OracleLimits& limits = {}) {
  detail::check_probabilities(p, q);
  detail::check_oracle_size(n, d, s, limits);
  const auto universe = detail::weight_masks(n, d);
  const auto big_n = static_cast<double>(universe.size());
  // expected[c] = E[sum over classes of C(k, c)]
  std::vector<CompensatedSum> expected(s + 1);
  std::vector<std::uint32_t> scratch;
  std::vector<std::size_t> sizes;
  detail::for_each_row_state(n, p, q, [&](std::uint32_t erased, std::uint32_t ones, double w) {
    if (w == 0) return;
    detail::signature_classes(universe, erased, ones, scratch, sizes);
    for (std::size_t c = 1; c <= s; ++c) {
      double tuples = 0;
      for (auto k : sizes) tuples += choose(static_cast<double>(k), static_cast<double>(c));
      if (tuples != 0) expected[c].add(w * tuples);
    }
  });
  InclusionExclusionTerms out;
  for (std::size_t c = 1; c <= s; ++c) {
    // C(N-c, s-c) / C(N, s) = prod_{j<c} (s-j)/(N-j)
    double ratio = 1.0;
    for (std::size_t j = 0; j < c; ++j) {
      ratio *= (static_cast<double>(s) - static_cast<double>(j)) / (big_n - static_cast<double>(j));
    }
    const double term = ratio * expected[c].value();
    if (c == 1) {
      out.first = term;
    } else if (c == 2) {
      out.second = term;
    } else {
      out.rest += (c % 2 == 1) ? term : -term;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mutual information of one test row

enum class CellState : std::uint8_t { Known0, Known1, Erased };

/// I(erased values of the row ; y) in bits, where the erased values are
/// i.i.d. Bernoulli(p) and y is the OR over supp(x) of the row's true values.
/// Computed by enumerating the erased cells inside supp(x); the erased cells
/// outside it are independent of y.
inline double mutual_information_row(const InputVector& x, std::span<const CellState> row,
                                     double p) {
  if (x.size() != row.size()) throw DimensionMismatch("pattern length differs from input length");
  if (!(p > 0 && p < 1)) throw DomainError("mutual information requires 0 < p < 1");
  bool known_one = false;
  std::size_t k = 0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (!x.get(j)) continue;
    if (row[j] == CellState::Known1) known_one = true;
    if (row[j] == CellState::Erased) ++k;
  }
  if (k > 24) throw CapacityExceeded("too many erased cells in the support to enumerate");

  const std::uint64_t assignments = std::uint64_t{1} << k;
  auto outcome = [&](std::uint64_t a) { return known_one || a != 0; };
  auto prob = [&](std::uint64_t a) {
    const auto ones = static_cast<double>(std::popcount(a));
    return std::pow(p, ones) * std::pow(1 - p, static_cast<double>(k) - ones);
  };

  CompensatedSum pr_y1;
  std::uint64_t positive = 0;
  for (std::uint64_t a = 0; a < assignments; ++a) {
    if (outcome(a)) {
      pr_y1.add(prob(a));
      ++positive;
    }
  }
  // Constant outcome: Pr(y | a) = Pr(y) for every a.
  if (positive == 0 || positive == assignments) return 0.0;

  // y is a function of the assignment, so Pr(y | a) is 0 or 1 and
  // I = sum_a Pr(a) * log2(1 / Pr(y = y(a))).
  CompensatedSum mi;
  for (std::uint64_t a = 0; a < assignments; ++a) {
    const double pr_y = outcome(a) ? pr_y1.value() : 1 - pr_y1.value();
    mi.add(prob(a) * -std::log2(pr_y));
  }
  return mi.value();
}

}  // namespace gtmc
