#pragma once

// Erasure injection, the missing matrix, erased-position bookkeeping and
// matrix completion from a recovered estimate.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gtmc/bits.hpp"
#include "gtmc/error.hpp"
#include "gtmc/gt_core.hpp"
#include "gtmc/rng.hpp"

namespace gtmc {

enum class Trit : std::uint8_t { Zero, One, Erased };

/// 0-based matrix cell.
struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

/// 1-based (i, j) as used in the text formats.
struct Position {
  std::size_t i = 0;
  std::size_t j = 0;
  friend constexpr bool operator==(const Position&, const Position&) = default;
};

/// 1-based linear index (i-1)*n + j of a 0-based cell.
constexpr std::size_t linear_index(Cell c, std::size_t n) noexcept {
  return c.row * n + c.col + 1;
}

/// Inverse of the linearization: g in [1, t*n] -> 1-based (i, j).
inline Position position_of(std::size_t g, std::size_t n, std::size_t t) {
  if (n == 0 || g < 1 || g > t * n) throw IndexOutOfRange("linear index outside [1, t*n]");
  const std::size_t i = (g + n - 1) / n;
  return {i, g - (i - 1) * n};
}

/// Matrix over {0, 1, erased}.
class MissingMatrix {
 public:
  MissingMatrix() = default;
  MissingMatrix(std::size_t rows, std::size_t cols)
      : ones_(rows, cols), erased_(rows, cols) {}

  static MissingMatrix from(const BitMatrix& m) {
    MissingMatrix out;
    out.ones_ = m;
    out.erased_ = BitMatrix(m.rows(), m.cols());
    return out;
  }

  std::size_t rows() const noexcept { return ones_.rows(); }
  std::size_t cols() const noexcept { return ones_.cols(); }

  Trit get(std::size_t i, std::size_t j) const noexcept {
    if (erased_.get(i, j)) return Trit::Erased;
    return ones_.get(i, j) ? Trit::One : Trit::Zero;
  }

  void set(std::size_t i, std::size_t j, Trit v) noexcept {
    erased_.set(i, j, v == Trit::Erased);
    ones_.set(i, j, v == Trit::One);
  }

  /// Known-one cells.
  const BitMatrix& ones() const noexcept { return ones_; }
  /// Erased cells.
  const BitMatrix& erased() const noexcept { return erased_; }

  std::size_t erased_count() const noexcept { return erased_.count(); }

  /// Binary matrix with every erased cell replaced by `value`.
  BitMatrix filled(bool value) const {
    BitMatrix out = ones_;
    if (value) {
      for (std::size_t i = 0; i < rows(); ++i) {
        auto dst = out.row(i);
        auto er = erased_.row(i);
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] |= er[k];
      }
    }
    return out;
  }

  friend bool operator==(const MissingMatrix&, const MissingMatrix&) = default;

 private:
  BitMatrix ones_;
  BitMatrix erased_;
};

/// Erased positions in left-to-right, top-to-bottom order. The position of
/// a cell in this order is its psi-index (0-based here).
class ErasureMap {
 public:
  ErasureMap() = default;

  /// Builds the map from arbitrary cells; they are sorted by linear index.
  ErasureMap(std::size_t rows, std::size_t cols, std::vector<Cell> cells)
      : rows_(rows), cols_(cols), cells_(std::move(cells)), row_begin_(rows + 1, 0) {
    std::ranges::sort(cells_);
    for (std::size_t g = 0; g < cells_.size(); ++g) {
      const Cell& c = cells_[g];
      if (c.row >= rows || c.col >= cols) throw IndexOutOfRange("erased cell outside the matrix");
      if (g > 0 && cells_[g - 1] == c) throw DomainError("duplicate erased cell");
      ++row_begin_[c.row + 1];
    }
    for (std::size_t i = 0; i < rows; ++i) row_begin_[i + 1] += row_begin_[i];
  }

  static ErasureMap of(const MissingMatrix& mm) {
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < mm.rows(); ++i) {
      const auto row = mm.erased().row(i);
      for (std::size_t k = 0; k < row.size(); ++k) {
        Word w = row[k];
        while (w) {
          cells.push_back({i, k * kWordBits + static_cast<std::size_t>(std::countr_zero(w))});
          w &= w - 1;
        }
      }
    }
    return ErasureMap(mm.rows(), mm.cols(), std::move(cells));
  }

  std::size_t size() const noexcept { return cells_.size(); }
  bool empty() const noexcept { return cells_.empty(); }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  const Cell& operator[](std::size_t g) const noexcept { return cells_[g]; }
  std::span<const Cell> cells() const noexcept { return cells_; }

  /// psi-indices of the erased cells on row i form [first, second).
  std::pair<std::size_t, std::size_t> row_range(std::size_t i) const noexcept {
    return {row_begin_[i], row_begin_[i + 1]};
  }

  std::optional<std::size_t> index_of(Cell c) const noexcept {
    if (c.row >= rows_) return std::nullopt;
    const auto first = cells_.begin() + static_cast<std::ptrdiff_t>(row_begin_[c.row]);
    const auto last = cells_.begin() + static_cast<std::ptrdiff_t>(row_begin_[c.row + 1]);
    const auto it = std::lower_bound(first, last, c);
    if (it == last || *it != c) return std::nullopt;
    return static_cast<std::size_t>(it - cells_.begin());
  }

  friend bool operator==(const ErasureMap&, const ErasureMap&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Cell> cells_;
  std::vector<std::size_t> row_begin_;
};

/// True values of the erased cells, in ErasureMap order.
using PsiVector = BitVector;

enum class PsiState : std::uint8_t { Zero, One, Unknown };
using PsiEstimate = std::vector<PsiState>;

inline PsiEstimate estimate_from(const PsiVector& psi) {
  PsiEstimate est(psi.size());
  for (std::size_t g = 0; g < psi.size(); ++g) est[g] = psi[g] ? PsiState::One : PsiState::Zero;
  return est;
}

struct Erasure {
  MissingMatrix missing;
  ErasureMap map;
  PsiVector psi;
};

/// Erases the given cells of M.
inline Erasure erase_cells(const BitMatrix& m, std::vector<Cell> cells) {
  Erasure out;
  out.map = ErasureMap(m.rows(), m.cols(), std::move(cells));
  out.missing = MissingMatrix::from(m);
  out.psi = PsiVector(out.map.size());
  for (std::size_t g = 0; g < out.map.size(); ++g) {
    const Cell c = out.map[g];
    out.psi.set(g, m.get(c.row, c.col));
    out.missing.set(c.row, c.col, Trit::Erased);
  }
  return out;
}

/// Each cell independently erased with probability q, regardless of its value.
inline Erasure erase_matrix(const BitMatrix& m, double q, RngStream& rng) {
  if (!(q >= 0 && q <= 1)) throw DomainError("q must lie in [0, 1]");
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (rng.bernoulli(q)) cells.push_back({i, j});
    }
  }
  return erase_cells(m, std::move(cells));
}

// ---------------------------------------------------------------------------
// Fill policies

enum class FillRule : std::uint8_t { Zero, One, Bernoulli, GreedyCover };

/// How entries left Unknown by the solver are materialized. `constrained`
/// applies to Unknown entries that appear in some erased-system row,
/// `unconstrained` to the rest. GreedyCover is only meaningful for
/// constrained entries; as an unconstrained rule it behaves like Zero.
struct FillPolicy {
  FillRule constrained = FillRule::GreedyCover;
  FillRule unconstrained = FillRule::Bernoulli;
  double p = 0.0;

  static FillPolicy uniform(FillRule rule, double p = 0.0) { return {rule, rule, p}; }
  static FillPolicy zero() { return uniform(FillRule::Zero); }
  static FillPolicy one() { return uniform(FillRule::One); }
  static FillPolicy bernoulli(double p) { return uniform(FillRule::Bernoulli, p); }
  static FillPolicy greedy_cover(double p, FillRule rest = FillRule::Bernoulli) {
    return {FillRule::GreedyCover, rest, p};
  }

  friend bool operator==(const FillPolicy&, const FillPolicy&) = default;
};

inline bool fill_value(FillRule rule, double p, RngStream& rng) {
  switch (rule) {
    case FillRule::One:
      return true;
    case FillRule::Bernoulli:
      return rng.bernoulli(p);
    case FillRule::Zero:
    case FillRule::GreedyCover:
      break;
  }
  return false;
}

/// Materializes M-hat: known cells copied, Zero/One estimates written
/// verbatim, Unknown entries drawn from the policy's unconstrained rule.
inline MeasurementMatrix complete_matrix(const MissingMatrix& mm, const ErasureMap& map,
                                         const PsiEstimate& est, const FillPolicy& policy,
                                         RngStream& rng) {
  if (est.size() != map.size()) throw DimensionMismatch("estimate length differs from r");
  if (map.rows() != mm.rows() || map.cols() != mm.cols()) {
    throw DimensionMismatch("erasure map does not match the missing matrix");
  }
  MeasurementMatrix out(mm.filled(false));
  for (std::size_t g = 0; g < map.size(); ++g) {
    const Cell c = map[g];
    bool v = false;
    switch (est[g]) {
      case PsiState::One:
        v = true;
        break;
      case PsiState::Zero:
        break;
      case PsiState::Unknown:
        v = fill_value(policy.unconstrained, policy.p, rng);
        break;
    }
    out.set(c.row, c.col, v);
  }
  return out;
}

}  // namespace gtmc
