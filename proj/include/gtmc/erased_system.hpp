#pragma once

// Informative pairs, their signatures, and the deduplicated erased system
// (Gamma, v) with Gamma (.) psi = v.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gtmc/bits.hpp"
#include "gtmc/erasure.hpp"
#include "gtmc/error.hpp"
#include "gtmc/gt_core.hpp"

namespace gtmc {

/// Sorted psi-indices of the erased cells of one row hit by supp(x).
using Signature = std::vector<std::uint32_t>;

/// (x, i) is informative when supp(x) meets an erased cell of row i and no
/// known one of row i.
inline bool is_informative(const MissingMatrix& mm, const InputVector& x, std::size_t i) {
  if (x.size() != mm.cols()) throw DimensionMismatch("input length differs from matrix columns");
  if (i >= mm.rows()) throw IndexOutOfRange("test row outside the matrix");
  return mm.erased().row_intersects(i, x) && !mm.ones().row_intersects(i, x);
}

inline Signature signature(const MissingMatrix& mm, const ErasureMap& map, const InputVector& x,
                           std::size_t i) {
  if (!is_informative(mm, x, i)) throw PreconditionViolated("signature of a non-informative pair");
  Signature sig;
  const auto [first, last] = map.row_range(i);
  for (std::size_t g = first; g < last; ++g) {
    if (x.get(map[g].col)) sig.push_back(static_cast<std::uint32_t>(g));
  }
  return sig;
}

struct RowSource {
  std::size_t sample = 0;    ///< index into the sample set
  std::size_t test_row = 0;  ///< 0-based test row i
  friend bool operator==(const RowSource&, const RowSource&) = default;
};

/// Erased system. Row k of Gamma is the indicator of rows[k] over [r].
struct ErasedSystem {
  std::vector<Signature> rows;
  std::vector<std::uint8_t> v;
  std::vector<RowSource> source;
  ErasureMap map;

  std::size_t h() const noexcept { return rows.size(); }
  std::size_t r() const noexcept { return map.size(); }

  /// Dense h x r Gamma.
  BitMatrix gamma() const {
    BitMatrix g(h(), r());
    for (std::size_t k = 0; k < h(); ++k) {
      for (auto z : rows[k]) g.set(k, z);
    }
    return g;
  }

  /// Number of rows whose source is test row i.
  std::size_t rows_from_test(std::size_t i) const noexcept {
    std::size_t c = 0;
    for (const auto& src : source) c += src.test_row == i;
    return c;
  }

  friend bool operator==(const ErasedSystem&, const ErasedSystem&) = default;
};

namespace detail {

struct SignatureHash {
  std::size_t operator()(const Signature& s) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ s.size();
    for (auto z : s) h = mix64(h ^ z);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// Scans samples in order and, within each sample, test rows in order. Every
/// informative pair contributes its signature; a repeated signature keeps
/// its first occurrence.
inline ErasedSystem build_erased_system(const MissingMatrix& mm, const ErasureMap& map,
                                        const SampleSet& samples) {
  if (map.rows() != mm.rows() || map.cols() != mm.cols()) {
    throw DimensionMismatch("erasure map does not match the missing matrix");
  }
  if (samples.inputs.size() != samples.outcomes.size()) {
    throw DimensionMismatch("sample inputs and outcomes differ in count");
  }
  ErasedSystem sys;
  sys.map = map;
  if (map.empty()) return sys;

  std::unordered_map<Signature, std::size_t, detail::SignatureHash> seen;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& x = samples.inputs[k];
    const auto& y = samples.outcomes[k];
    if (y.size() != mm.rows()) throw DimensionMismatch("outcome length differs from matrix rows");
    for (std::size_t i = 0; i < mm.rows(); ++i) {
      if (!is_informative(mm, x, i)) continue;
      auto sig = signature(mm, map, x, i);
      const std::uint8_t outcome = y.get(i) ? 1 : 0;
      const auto [it, inserted] = seen.try_emplace(sig, sys.rows.size());
      if (!inserted) {
        if (sys.v[it->second] != outcome) {
          throw InconsistentOutcome("identical signatures observed with different outcomes");
        }
        continue;
      }
      sys.rows.push_back(std::move(sig));
      sys.v.push_back(outcome);
      sys.source.push_back({k, i});
    }
  }
  return sys;
}

/// Gamma (.) psi under Boolean OR.
inline std::vector<std::uint8_t> apply(const ErasedSystem& sys, const PsiVector& psi) {
  if (psi.size() != sys.r()) throw DimensionMismatch("psi length differs from r");
  std::vector<std::uint8_t> out(sys.h(), 0);
  for (std::size_t k = 0; k < sys.h(); ++k) {
    for (auto z : sys.rows[k]) {
      if (psi.get(z)) {
        out[k] = 1;
        break;
      }
    }
  }
  return out;
}

inline bool satisfies(const ErasedSystem& sys, const PsiVector& psi) { return apply(sys, psi) == sys.v; }

}  // namespace gtmc
