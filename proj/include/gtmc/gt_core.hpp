#pragma once

// Base group-testing objects: Bernoulli measurement matrices, input vectors,
// Boolean-OR test outcomes and uniform sampling of weight-d inputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "gtmc/bits.hpp"
#include "gtmc/error.hpp"
#include "gtmc/rng.hpp"

namespace gtmc {

/// Generative parameters of one instance.
struct ModelParams {
  std::size_t n = 0;  ///< items
  std::size_t t = 0;  ///< tests
  std::size_t d = 1;  ///< defectives per sampled input
  double p = 0.0;     ///< Pr(m_ij = 1)
  double q = 0.0;     ///< Pr(cell erased)
  std::size_t s = 1;  ///< recovery samples
  std::uint64_t seed = 0;

  /// Throws DomainError when a field is out of range. The sample count is
  /// checked against C(n,d) by sample_pairs, not here.
  void validate() const;

  /// 0 < p, q < 1: the regime where the closed forms are strict.
  bool interior() const noexcept { return p > 0 && p < 1 && q > 0 && q < 1; }
};

struct Limits {
  std::size_t max_cols = 100'000;
  std::size_t max_cells = std::size_t{1} << 32;
};

class MeasurementMatrix : public BitMatrix {
 public:
  using BitMatrix::BitMatrix;
  MeasurementMatrix() = default;
  explicit MeasurementMatrix(BitMatrix bits) : BitMatrix(std::move(bits)) {}
};

using InputVector = BitVector;
using OutcomeVector = BitVector;

/// Ordered samples chi with their outcomes gamma; outcomes[k] = M (.) inputs[k].
struct SampleSet {
  std::vector<InputVector> inputs;
  std::vector<OutcomeVector> outcomes;

  std::size_t size() const noexcept { return inputs.size(); }
};

enum class SamplingMode {
  WithoutReplacement,  ///< uniform s-subset of T_d
  Iid,                 ///< s independent uniform draws; duplicates possible
};

// ---------------------------------------------------------------------------
// Binomial coefficients

/// Exact C(n, k), saturating at UINT64_MAX on overflow.
inline std::uint64_t choose_saturating(std::uint64_t n, std::uint64_t k) noexcept {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(c);
}

/// C(n, k) as a double; exact while the value fits in 53 bits.
inline double choose(double n, double k) noexcept {
  if (k < 0 || k > n) return 0.0;
  if (n < 64) {
    const auto exact = choose_saturating(static_cast<std::uint64_t>(n),
                                         static_cast<std::uint64_t>(k));
    if (exact < (std::uint64_t{1} << 53)) return static_cast<double>(exact);
  }
  return std::round(std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)));
}

inline void ModelParams::validate() const {
  if (n == 0 || t == 0) throw DomainError("n and t must be positive");
  if (d < 1 || d > n) throw DomainError("d must satisfy 1 <= d <= n");
  if (!(p >= 0 && p <= 1)) throw DomainError("p must lie in [0, 1]");
  if (!(q >= 0 && q <= 1)) throw DomainError("q must lie in [0, 1]");
  if (s < 1) throw DomainError("s must be at least 1");
  if (s > choose_saturating(n, d)) throw InsufficientUniverse("s exceeds C(n, d)");
}

// ---------------------------------------------------------------------------

inline void check_capacity(std::size_t t, std::size_t n, const Limits& limits = {}) {
  if (n > limits.max_cols) throw CapacityExceeded("column count exceeds the configured cap");
  if (n != 0 && t > limits.max_cells / n) {
    throw CapacityExceeded("t*n exceeds the configured cell cap");
  }
}

/// Bernoulli(p) design: every entry independently 1 with probability p.
inline MeasurementMatrix generate_matrix(std::size_t t, std::size_t n, double p,
                                         RngStream& rng, const Limits& limits = {}) {
  if (t == 0 || n == 0) throw DomainError("matrix dimensions must be positive");
  if (!(p >= 0 && p <= 1)) throw DomainError("p must lie in [0, 1]");
  check_capacity(t, n, limits);
  MeasurementMatrix m(t, n);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.bernoulli(p)) m.set(i, j);
    }
  }
  return m;
}

inline MeasurementMatrix generate_matrix(const ModelParams& params, RngStream& rng,
                                         const Limits& limits = {}) {
  return generate_matrix(params.t, params.n, params.p, rng, limits);
}

/// y_i = OR_{j in supp(x)} m_ij.
inline OutcomeVector test_outcome(const BitMatrix& m, const InputVector& x) {
  if (x.size() != m.cols()) throw DimensionMismatch("input length differs from matrix columns");
  OutcomeVector y(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (m.row_intersects(i, x)) y.set(i);
  }
  return y;
}

/// Uniform d-subset of [0, n) by Floyd's algorithm, as a bit vector.
inline InputVector random_weight_vector(std::size_t n, std::size_t d, RngStream& rng) {
  InputVector x(n);
  for (std::size_t j = n - d; j < n; ++j) {
    const auto pick = static_cast<std::size_t>(rng.below(j + 1));
    x.set(x.get(pick) ? j : pick);
  }
  return x;
}

namespace detail {

struct WordsHash {
  std::size_t operator()(const BitVector& v) const noexcept {
    std::uint64_t h = 0x243F6A8885A308D3ULL;
    for (Word w : v.words()) h = mix64(h ^ w);
    return static_cast<std::size_t>(h);
  }
};

/// All weight-d vectors of length n in lexicographic order of supports.
inline std::vector<InputVector> enumerate_weight_vectors(std::size_t n, std::size_t d) {
  std::vector<InputVector> out;
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    out.push_back(InputVector::from_support(n, idx));
    std::size_t k = d;
    while (k > 0 && idx[k - 1] == n - d + (k - 1)) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t m = k; m < d; ++m) idx[m] = idx[m - 1] + 1;
  }
  return out;
}

}  // namespace detail

/// Draws s weight-d inputs and their outcomes under M. The default mode
/// draws a uniformly random s-subset of T_d in uniformly random order.
inline SampleSet sample_pairs(const BitMatrix& m, std::size_t d, std::size_t s, RngStream& rng,
                              SamplingMode mode = SamplingMode::WithoutReplacement) {
  const std::size_t n = m.cols();
  if (d < 1 || d > n) throw DomainError("d must satisfy 1 <= d <= n");
  if (s < 1) throw DomainError("s must be at least 1");
  const std::uint64_t universe = choose_saturating(n, d);

  SampleSet out;
  out.inputs.reserve(s);
  if (mode == SamplingMode::Iid) {
    for (std::size_t k = 0; k < s; ++k) out.inputs.push_back(random_weight_vector(n, d, rng));
  } else {
    if (s > universe) throw InsufficientUniverse("s exceeds C(n, d)");
    if (universe <= 4 * static_cast<std::uint64_t>(s) && universe <= 1'000'000) {
      // Dense regime: partial Fisher-Yates over the enumerated universe.
      auto all = detail::enumerate_weight_vectors(n, d);
      for (std::size_t k = 0; k < s; ++k) {
        const auto pick = k + static_cast<std::size_t>(rng.below(all.size() - k));
        std::swap(all[k], all[pick]);
        out.inputs.push_back(std::move(all[k]));
      }
    } else {
      std::unordered_set<InputVector, detail::WordsHash> seen;
      while (out.inputs.size() < s) {
        auto x = random_weight_vector(n, d, rng);
        if (seen.insert(x).second) out.inputs.push_back(std::move(x));
      }
    }
  }

  out.outcomes.reserve(s);
  for (const auto& x : out.inputs) out.outcomes.push_back(test_outcome(m, x));
  return out;
}

}  // namespace gtmc
