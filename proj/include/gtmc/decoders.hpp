#pragma once

// Noiseless group-testing decoders: COMP, SCOMP and SSS (smallest satisfying
// set, by branch and bound). Items are 0-based column indices.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "gtmc/bits.hpp"
#include "gtmc/error.hpp"
#include "gtmc/gt_core.hpp"

namespace gtmc {

inline constexpr std::uint64_t kDefaultSssBudget = 1'000'000;

struct DecodeResult {
  std::vector<std::size_t> declared;  ///< sorted item indices
  bool exact = true;                  ///< SSS search finished within budget
  bool satisfies = false;             ///< declared set reproduces y
  std::uint64_t nodes = 0;            ///< SSS search nodes visited
};

/// True when the OR of the declared columns equals y.
inline bool explains(const BitMatrix& m, const OutcomeVector& y,
                     const std::vector<std::size_t>& declared) {
  return test_outcome(m, InputVector::from_support(m.cols(), declared)) == y;
}

namespace detail {

inline void check_dims(const BitMatrix& m, const OutcomeVector& y) {
  if (y.size() != m.rows()) throw DimensionMismatch("outcome length differs from matrix rows");
}

/// Items appearing in no negative test.
inline std::vector<std::size_t> possible_defectives(const BitMatrix& m, const OutcomeVector& y) {
  BitVector in_negative(m.cols());
  auto acc = in_negative.words();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (y.get(i)) continue;
    const auto row = m.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) acc[k] |= row[k];
  }
  std::vector<std::size_t> pd;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (!in_negative.get(j)) pd.push_back(j);
  }
  return pd;
}

/// For each PD item, the set of positive tests (indexed 0..P-1) containing it.
struct CoverTable {
  std::vector<std::size_t> pd;
  std::vector<std::size_t> positive;  // test row of each positive-test index
  std::vector<BitVector> covers;      // per PD item, over positive tests
};

inline CoverTable cover_table(const BitMatrix& m, const OutcomeVector& y) {
  CoverTable ct;
  ct.pd = possible_defectives(m, y);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (y.get(i)) ct.positive.push_back(i);
  }
  ct.covers.assign(ct.pd.size(), BitVector(ct.positive.size()));
  for (std::size_t k = 0; k < ct.pd.size(); ++k) {
    for (std::size_t pi = 0; pi < ct.positive.size(); ++pi) {
      if (m.get(ct.positive[pi], ct.pd[k])) ct.covers[k].set(pi);
    }
  }
  return ct;
}

inline std::size_t count_and_not(const BitVector& a, const BitVector& covered) {
  std::size_t c = 0;
  const auto aw = a.words();
  const auto cw = covered.words();
  for (std::size_t k = 0; k < aw.size(); ++k) {
    c += static_cast<std::size_t>(std::popcount(aw[k] & ~cw[k]));
  }
  return c;
}

}  // namespace detail

/// Declares every item that appears in no negative test.
inline DecodeResult comp(const BitMatrix& m, const OutcomeVector& y) {
  detail::check_dims(m, y);
  DecodeResult out;
  out.declared = detail::possible_defectives(m, y);
  out.satisfies = explains(m, y, out.declared);
  return out;
}

/// Definite defectives (sole PD member of some positive test), then greedy
/// cover of the still-unexplained positive tests by PD items.
inline DecodeResult scomp(const BitMatrix& m, const OutcomeVector& y) {
  detail::check_dims(m, y);
  const auto ct = detail::cover_table(m, y);
  const std::size_t npd = ct.pd.size();
  const std::size_t npos = ct.positive.size();

  std::vector<std::uint8_t> chosen(npd, 0);
  for (std::size_t pi = 0; pi < npos; ++pi) {
    std::size_t members = 0;
    std::size_t last = 0;
    for (std::size_t k = 0; k < npd && members < 2; ++k) {
      if (ct.covers[k].get(pi)) {
        ++members;
        last = k;
      }
    }
    if (members == 1) chosen[last] = 1;
  }

  BitVector covered(npos);
  for (std::size_t k = 0; k < npd; ++k) {
    if (chosen[k]) covered |= ct.covers[k];
  }
  while (true) {
    std::size_t best = npd;
    std::size_t best_gain = 0;
    for (std::size_t k = 0; k < npd; ++k) {
      if (chosen[k]) continue;
      const std::size_t gain = detail::count_and_not(ct.covers[k], covered);
      if (gain > best_gain) {
        best_gain = gain;
        best = k;
      }
    }
    if (best == npd) break;
    chosen[best] = 1;
    covered |= ct.covers[best];
  }

  DecodeResult out;
  for (std::size_t k = 0; k < npd; ++k) {
    if (chosen[k]) out.declared.push_back(ct.pd[k]);
  }
  out.satisfies = explains(m, y, out.declared);
  return out;
}

namespace detail {

/// Include-first depth-first search over PD items in ascending order, so
/// the first minimum-cardinality set reached is the lexicographically
/// smallest one. Lower bound: a greedy family of unexplained positive tests
/// with pairwise-disjoint remaining candidates.
class SssSearch {
 public:
  SssSearch(const CoverTable& ct, std::uint64_t budget) : ct_(ct), budget_(budget) {
    const std::size_t npd = ct.pd.size();
    const std::size_t npos = ct.positive.size();
    candidates_.assign(npos, BitVector(npd));
    last_candidate_.assign(npos, -1);
    for (std::size_t k = 0; k < npd; ++k) {
      for (std::size_t pi = 0; pi < npos; ++pi) {
        if (ct.covers[k].get(pi)) {
          candidates_[pi].set(k);
          last_candidate_[pi] = static_cast<std::ptrdiff_t>(k);
        }
      }
    }
    test_order_.resize(npos);
    std::iota(test_order_.begin(), test_order_.end(), std::size_t{0});
    std::ranges::stable_sort(test_order_, [&](std::size_t a, std::size_t b) {
      return candidates_[a].count() < candidates_[b].count();
    });
    suffix_masks_.assign(npd + 1, BitVector(npd));
    for (std::size_t k = npd; k-- > 0;) {
      suffix_masks_[k] = suffix_masks_[k + 1];
      suffix_masks_[k].set(k);
    }
  }

  bool feasible() const {
    return std::ranges::all_of(last_candidate_, [](auto l) { return l >= 0; });
  }

  /// Runs the search with `incumbent_size` as an upper bound (sets of that
  /// size are still accepted). Returns true when a set was found.
  bool run(std::size_t incumbent_size) {
    best_size_ = incumbent_size + 1;
    BitVector covered(ct_.positive.size());
    dfs(0, covered);
    return found_;
  }

  bool aborted() const noexcept { return aborted_; }
  std::uint64_t nodes() const noexcept { return nodes_; }
  const std::vector<std::size_t>& best() const noexcept { return best_; }

 private:
  void dfs(std::size_t pos, const BitVector& covered) {
    if (aborted_) return;
    if (++nodes_ > budget_) {
      aborted_ = true;
      return;
    }
    const std::size_t npos = ct_.positive.size();
    if (covered.count() == npos) {
      if (stack_.size() < best_size_) {
        best_size_ = stack_.size();
        best_.clear();
        for (auto k : stack_) best_.push_back(ct_.pd[k]);
        found_ = true;
      }
      return;
    }
    if (pos == ct_.pd.size()) return;

    // Lower bound over unexplained tests; also detects dead tests.
    std::size_t lb = 0;
    BitVector used(ct_.pd.size());
    for (std::size_t pi : test_order_) {
      if (covered.get(pi)) continue;
      if (last_candidate_[pi] < static_cast<std::ptrdiff_t>(pos)) return;
      const BitVector remaining = candidates_[pi] & suffix_masks_[pos];
      if (!remaining.intersects(used)) {
        ++lb;
        used |= remaining;
      }
    }
    if (stack_.size() + lb >= best_size_) return;

    if (count_and_not(ct_.covers[pos], covered) > 0) {
      stack_.push_back(pos);
      dfs(pos + 1, covered | ct_.covers[pos]);
      stack_.pop_back();
    }
    dfs(pos + 1, covered);
  }

  const CoverTable& ct_;
  std::uint64_t budget_;
  std::vector<BitVector> candidates_;
  std::vector<std::ptrdiff_t> last_candidate_;
  std::vector<std::size_t> test_order_;
  std::vector<BitVector> suffix_masks_;

  std::vector<std::size_t> stack_;
  std::vector<std::size_t> best_;
  std::size_t best_size_ = 0;
  std::uint64_t nodes_ = 0;
  bool found_ = false;
  bool aborted_ = false;
};

}  // namespace detail

/// Smallest satisfying set. `exact` is false when the node budget ran out;
/// the best set found so far (seeded with SCOMP) is returned in that case.
inline DecodeResult sss(const BitMatrix& m, const OutcomeVector& y,
                        std::uint64_t node_budget = kDefaultSssBudget) {
  detail::check_dims(m, y);
  if (node_budget < 1) throw DomainError("node budget must be at least 1");
  DecodeResult out = scomp(m, y);
  const auto ct = detail::cover_table(m, y);
  detail::SssSearch search(ct, node_budget);
  if (!search.feasible()) {
    // Some positive test has no PD member: nothing satisfies y.
    return out;
  }
  const std::size_t bound = out.satisfies ? out.declared.size() : ct.pd.size();
  if (search.run(bound)) out.declared = search.best();
  out.exact = !search.aborted();
  out.nodes = search.nodes();
  out.satisfies = explains(m, y, out.declared);
  return out;
}

}  // namespace gtmc
