#pragma once

// Recovery of psi from an erased system: unit forcing to a fixpoint, bounded
// exhaustive enumeration per test-row component, and fill of what remains.

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "gtmc/erased_system.hpp"
#include "gtmc/erasure.hpp"
#include "gtmc/error.hpp"
#include "gtmc/rng.hpp"

namespace gtmc {

inline constexpr std::size_t kDefaultEnumLimit = 20;

struct SolveReport {
  PsiEstimate estimate;
  std::size_t forced_zero = 0;
  std::size_t forced_one = 0;
  std::size_t unknown = 0;
  std::size_t components = 0;  ///< distinct source test rows among Gamma rows
  std::size_t enumerated = 0;  ///< components that went through enumeration
};

namespace detail {

inline bool row_has_one(const Signature& row, const PsiEstimate& est) {
  return std::ranges::any_of(row, [&](auto z) { return est[z] == PsiState::One; });
}

}  // namespace detail

/// Rules, applied until nothing changes:
///   a negative row forces every covered entry to Zero;
///   a positive row holding a One is satisfied;
///   a positive row with a single non-Zero entry forces it to One.
/// Components with at most `enum_limit` open entries are then enumerated
/// and entries that are constant over all consistent assignments promoted.
inline SolveReport solve_psi(const ErasedSystem& sys, std::size_t enum_limit = kDefaultEnumLimit) {
  if (sys.v.size() != sys.h() || sys.source.size() != sys.h()) {
    throw DimensionMismatch("erased system rows, outcomes and sources differ in count");
  }
  const std::size_t r = sys.r();
  PsiEstimate est(r, PsiState::Unknown);

  for (std::size_t k = 0; k < sys.h(); ++k) {
    if (sys.v[k]) continue;
    for (auto z : sys.rows[k]) {
      if (z >= r) throw IndexOutOfRange("Gamma column beyond r");
      est[z] = PsiState::Zero;
    }
  }

  std::vector<std::size_t> open;  // positive rows not yet satisfied
  for (std::size_t k = 0; k < sys.h(); ++k) {
    if (sys.v[k]) open.push_back(k);
  }

  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::size_t> still_open;
    for (std::size_t k : open) {
      const auto& row = sys.rows[k];
      std::size_t candidates = 0;
      std::uint32_t last = 0;
      bool satisfied = false;
      for (auto z : row) {
        if (est[z] == PsiState::One) {
          satisfied = true;
          break;
        }
        if (est[z] == PsiState::Unknown) {
          ++candidates;
          last = z;
        }
      }
      if (satisfied) continue;
      if (candidates == 0) throw InconsistentSystem("positive row with every entry forced to zero");
      if (candidates == 1) {
        est[last] = PsiState::One;
        changed = true;
        continue;
      }
      still_open.push_back(k);
    }
    open.swap(still_open);
  }

  SolveReport report;

  // Rows from different test rows have disjoint supports, so each test row
  // is an independent component.
  std::map<std::size_t, std::vector<std::size_t>> by_test_row;
  for (std::size_t k = 0; k < sys.h(); ++k) by_test_row[sys.source[k].test_row];
  for (std::size_t k : open) by_test_row[sys.source[k].test_row].push_back(k);
  report.components = by_test_row.size();

  for (const auto& [test_row, rows] : by_test_row) {
    if (rows.empty()) continue;
    std::vector<std::uint32_t> vars;
    for (std::size_t k : rows) {
      for (auto z : sys.rows[k]) {
        if (est[z] == PsiState::Unknown) vars.push_back(z);
      }
    }
    std::ranges::sort(vars);
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    if (vars.empty() || vars.size() > enum_limit) continue;

    std::vector<std::uint64_t> row_masks;
    for (std::size_t k : rows) {
      std::uint64_t mask = 0;
      for (auto z : sys.rows[k]) {
        const auto it = std::ranges::lower_bound(vars, z);
        if (it != vars.end() && *it == z) mask |= std::uint64_t{1} << (it - vars.begin());
      }
      row_masks.push_back(mask);
    }
    std::uint64_t always_one = ~std::uint64_t{0};
    std::uint64_t ever_one = 0;
    bool feasible = false;
    const std::uint64_t total = std::uint64_t{1} << vars.size();
    for (std::uint64_t a = 0; a < total; ++a) {
      if (std::ranges::all_of(row_masks, [a](std::uint64_t m) { return (m & a) != 0; })) {
        feasible = true;
        always_one &= a;
        ever_one |= a;
      }
    }
    if (!feasible) throw InconsistentSystem("no assignment satisfies a component");
    ++report.enumerated;
    for (std::size_t b = 0; b < vars.size(); ++b) {
      if ((always_one >> b) & 1U) {
        est[vars[b]] = PsiState::One;
      } else if (!((ever_one >> b) & 1U)) {
        est[vars[b]] = PsiState::Zero;
      }
    }
  }

  for (auto s : est) {
    if (s == PsiState::Zero) {
      ++report.forced_zero;
    } else if (s == PsiState::One) {
      ++report.forced_one;
    } else {
      ++report.unknown;
    }
  }
  report.estimate = std::move(est);
  return report;
}

struct ResolveResult {
  PsiVector psi;
  /// Gamma rows whose outcome the filled psi does not reproduce.
  std::vector<std::size_t> violated_rows;
};

/// Turns a solver report into a full binary psi. Under GreedyCover the
/// Unknown entry covering the most unsatisfied positive rows (lowest index on
/// ties) is set to One until every positive row holds a One; the remaining
/// constrained Unknowns become Zero. Entries outside every Gamma row follow
/// policy.unconstrained.
inline ResolveResult resolve_unknowns(const SolveReport& report, const ErasedSystem& sys,
                                      const FillPolicy& policy, RngStream& rng) {
  const std::size_t r = sys.r();
  if (report.estimate.size() != r) throw DimensionMismatch("estimate length differs from r");
  PsiEstimate est = report.estimate;

  std::vector<std::uint8_t> constrained(r, 0);
  for (const auto& row : sys.rows) {
    for (auto z : row) constrained[z] = 1;
  }

  if (policy.constrained == FillRule::GreedyCover) {
    std::vector<std::size_t> open;
    for (std::size_t k = 0; k < sys.h(); ++k) {
      if (sys.v[k] && !detail::row_has_one(sys.rows[k], est)) open.push_back(k);
    }
    while (!open.empty()) {
      std::map<std::uint32_t, std::size_t> cover;
      for (std::size_t k : open) {
        for (auto z : sys.rows[k]) {
          if (est[z] == PsiState::Unknown) ++cover[z];
        }
      }
      if (cover.empty()) break;  // unsatisfiable; reported via violated_rows
      auto best = cover.begin();
      for (auto it = cover.begin(); it != cover.end(); ++it) {
        if (it->second > best->second) best = it;
      }
      est[best->first] = PsiState::One;
      std::erase_if(open, [&](std::size_t k) { return detail::row_has_one(sys.rows[k], est); });
    }
  }

  ResolveResult out{PsiVector(r), {}};
  for (std::size_t g = 0; g < r; ++g) {
    bool v = false;
    switch (est[g]) {
      case PsiState::One:
        v = true;
        break;
      case PsiState::Zero:
        break;
      case PsiState::Unknown:
        v = fill_value(constrained[g] ? policy.constrained : policy.unconstrained, policy.p, rng);
        break;
    }
    out.psi.set(g, v);
  }

  const auto produced = apply(sys, out.psi);
  for (std::size_t k = 0; k < sys.h(); ++k) {
    if (produced[k] != sys.v[k]) out.violated_rows.push_back(k);
  }
  return out;
}

}  // namespace gtmc
