#pragma once

// Plain-text formats.
//
//   matrix          "t n" header, then t lines of n characters from {0,1}
//   missing matrix  same, alphabet {0,1,*} with '*' marking an erased cell
//   psi file        one "i j v" line per erased cell, v in {0,1,?}
//   erased system   "h r" header, h lines of r bits (Gamma), a blank line,
//                   h lines holding one bit of v each, a blank line, then r
//                   "z i j" lines mapping Gamma column z to cell (i, j)
//   samples         "s n t" header, then s lines "<x bits> <y bits>"
//   outcome         one line of t bits
//
// Every index written to or read from a file is 1-based.

#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gtmc/erased_system.hpp"
#include "gtmc/erasure.hpp"
#include "gtmc/error.hpp"
#include "gtmc/gt_core.hpp"

namespace gtmc::io {

namespace detail {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  /// Next line without its terminator; nullopt at end of input.
  std::optional<std::string_view> next() {
    if (pos_ >= text_.size()) return std::nullopt;
    const auto end = text_.find('\n', pos_);
    std::string_view line = text_.substr(pos_, end == std::string_view::npos ? text_.npos : end - pos_);
    pos_ = end == std::string_view::npos ? text_.size() : end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no_;
    return line;
  }

  std::string_view require(const char* what) {
    auto line = next();
    if (!line) throw ParseError(line_no_ + 1, 0, std::string("unexpected end of input, expected ") + what);
    return *line;
  }

  /// Skips blank lines and returns the first non-blank one, if any.
  std::optional<std::string_view> next_nonblank() {
    while (auto line = next()) {
      if (line->find_first_not_of(" \t") != std::string_view::npos) return line;
    }
    return std::nullopt;
  }

  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

inline std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
    const std::size_t start = k;
    while (k < line.size() && line[k] != ' ' && line[k] != '\t') ++k;
    if (k > start) out.push_back(line.substr(start, k - start));
  }
  return out;
}

inline std::size_t parse_count(std::string_view field, std::size_t line, const char* what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(line, 0, std::string("malformed ") + what);
  }
  return value;
}

inline std::pair<std::size_t, std::size_t> parse_header2(LineReader& in, const char* what) {
  const auto line = in.require("header");
  const auto f = fields(line);
  if (f.size() != 2) throw ParseError(in.line_no(), 0, std::string("header must be \"") + what + "\"");
  return {parse_count(f[0], in.line_no(), "header count"),
          parse_count(f[1], in.line_no(), "header count")};
}

inline BitVector parse_bits(std::string_view bits, std::size_t expected, std::size_t line) {
  if (bits.size() != expected) {
    throw ParseError(line, 0,
                     "row length " + std::to_string(bits.size()) + ", expected " + std::to_string(expected));
  }
  BitVector v(expected);
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] == '1') {
      v.set(j);
    } else if (bits[j] != '0') {
      throw ParseError(line, j + 1, std::string("illegal character '") + bits[j] + "'");
    }
  }
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrices

inline std::string write_matrix(const BitMatrix& m) {
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  out.reserve(out.size() + m.rows() * (m.cols() + 1));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out.push_back(m.get(i, j) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

inline std::string write_matrix(const MissingMatrix& m) {
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Trit v = m.get(i, j);
      out.push_back(v == Trit::Erased ? '*' : v == Trit::One ? '1' : '0');
    }
    out.push_back('\n');
  }
  return out;
}

using AnyMatrix = std::variant<MeasurementMatrix, MissingMatrix>;

/// Alphabet {0,1} yields a MeasurementMatrix; any '*' yields a MissingMatrix.
inline AnyMatrix parse_matrix_file(std::string_view text) {
  detail::LineReader in(text);
  const auto [t, n] = detail::parse_header2(in, "t n");
  if (t == 0 || n == 0) throw ParseError(1, 0, "dimensions must be positive");
  check_capacity(t, n);
  MissingMatrix mm(t, n);
  bool any_erased = false;
  for (std::size_t i = 0; i < t; ++i) {
    const auto line = in.require("matrix row");
    if (line.size() != n) {
      throw ParseError(in.line_no(), 0,
                       "row length " + std::to_string(line.size()) + ", expected " + std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      switch (line[j]) {
        case '0':
          break;
        case '1':
          mm.set(i, j, Trit::One);
          break;
        case '*':
          mm.set(i, j, Trit::Erased);
          any_erased = true;
          break;
        default:
          throw ParseError(in.line_no(), j + 1, std::string("illegal character '") + line[j] + "'");
      }
    }
  }
  if (auto extra = in.next_nonblank()) throw ParseError(in.line_no(), 0, "trailing content after the last row");
  if (any_erased) return mm;
  return MeasurementMatrix(mm.ones());
}

inline MeasurementMatrix parse_measurement_matrix(std::string_view text) {
  auto any = parse_matrix_file(text);
  if (auto* m = std::get_if<MeasurementMatrix>(&any)) return std::move(*m);
  throw ParseError(1, 0, "expected a binary matrix, found erased cells");
}

/// Accepts either alphabet; a binary matrix becomes a MissingMatrix with no
/// erased cells.
inline MissingMatrix parse_missing_matrix(std::string_view text) {
  auto any = parse_matrix_file(text);
  if (auto* m = std::get_if<MissingMatrix>(&any)) return std::move(*m);
  return MissingMatrix::from(std::get<MeasurementMatrix>(any));
}

// ---------------------------------------------------------------------------
// Psi file

inline char psi_char(PsiState s) noexcept {
  return s == PsiState::Zero ? '0' : s == PsiState::One ? '1' : '?';
}

inline std::string write_psi(const ErasureMap& map, const PsiEstimate& est) {
  if (est.size() != map.size()) throw DimensionMismatch("estimate length differs from r");
  std::string out;
  for (std::size_t g = 0; g < map.size(); ++g) {
    out += std::to_string(map[g].row + 1) + " " + std::to_string(map[g].col + 1) + " " +
           psi_char(est[g]) + "\n";
  }
  return out;
}

inline std::string write_psi(const ErasureMap& map, const PsiVector& psi) {
  return write_psi(map, estimate_from(psi));
}

struct PsiFile {
  std::vector<Position> positions;
  PsiEstimate states;
};

inline PsiFile parse_psi(std::string_view text) {
  detail::LineReader in(text);
  PsiFile out;
  while (auto line = in.next_nonblank()) {
    const auto f = detail::fields(*line);
    if (f.size() != 3 || f[2].size() != 1) throw ParseError(in.line_no(), 0, "expected \"i j v\"");
    const auto i = detail::parse_count(f[0], in.line_no(), "row index");
    const auto j = detail::parse_count(f[1], in.line_no(), "column index");
    if (i == 0 || j == 0) throw ParseError(in.line_no(), 0, "indices are 1-based");
    PsiState s;
    switch (f[2][0]) {
      case '0':
        s = PsiState::Zero;
        break;
      case '1':
        s = PsiState::One;
        break;
      case '?':
        s = PsiState::Unknown;
        break;
      default:
        throw ParseError(in.line_no(), 0, "value must be 0, 1 or ?");
    }
    out.positions.push_back({i, j});
    out.states.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Erased system

inline std::string write_system(const ErasedSystem& sys) {
  std::ostringstream out;
  out << sys.h() << ' ' << sys.r() << '\n';
  const BitMatrix g = sys.gamma();
  for (std::size_t k = 0; k < sys.h(); ++k) {
    for (std::size_t z = 0; z < sys.r(); ++z) out << (g.get(k, z) ? '1' : '0');
    out << '\n';
  }
  out << '\n';
  for (auto v : sys.v) out << static_cast<int>(v) << '\n';
  out << '\n';
  for (std::size_t z = 0; z < sys.r(); ++z) {
    out << z + 1 << ' ' << sys.map[z].row + 1 << ' ' << sys.map[z].col + 1 << '\n';
  }
  return out.str();
}

/// Reads a dumped erased system. The matrix dimensions of the attached
/// ErasureMap are the smallest that hold every mapped cell unless `rows`
/// and `cols` are given; row provenance keeps the test row only.
inline ErasedSystem parse_system(std::string_view text, std::size_t rows = 0, std::size_t cols = 0) {
  detail::LineReader in(text);
  const auto [h, r] = detail::parse_header2(in, "h r");
  std::vector<BitVector> gamma;
  for (std::size_t k = 0; k < h; ++k) {
    const auto line = in.require("Gamma row");
    gamma.push_back(detail::parse_bits(line, r, in.line_no()));
  }
  {
    const auto blank = in.require("blank separator");
    if (blank.find_first_not_of(" \t") != std::string_view::npos) {
      throw ParseError(in.line_no(), 0, "expected a blank line after Gamma");
    }
  }
  ErasedSystem sys;
  for (std::size_t k = 0; k < h; ++k) {
    const auto line = in.require("outcome bit");
    if (line != "0" && line != "1") throw ParseError(in.line_no(), 0, "outcome must be 0 or 1");
    sys.v.push_back(line == "1" ? 1 : 0);
  }
  std::vector<Cell> cells(r);
  std::vector<std::uint8_t> seen(r, 0);
  for (std::size_t c = 0; c < r; ++c) {
    const auto line = in.next_nonblank();
    if (!line) throw ParseError(in.line_no() + 1, 0, "missing column map entry");
    const auto f = detail::fields(*line);
    if (f.size() != 3) throw ParseError(in.line_no(), 0, "expected \"z i j\"");
    const auto z = detail::parse_count(f[0], in.line_no(), "column");
    const auto i = detail::parse_count(f[1], in.line_no(), "row index");
    const auto j = detail::parse_count(f[2], in.line_no(), "column index");
    if (z == 0 || z > r || i == 0 || j == 0) throw ParseError(in.line_no(), 0, "index out of range");
    if (seen[z - 1]) throw ParseError(in.line_no(), 0, "column mapped twice");
    seen[z - 1] = 1;
    cells[z - 1] = {i - 1, j - 1};
    rows = std::max(rows, i);
    cols = std::max(cols, j);
  }
  if (in.next_nonblank()) throw ParseError(in.line_no(), 0, "trailing content after the column map");
  for (std::size_t z = 1; z < r; ++z) {
    if (!(cells[z - 1] < cells[z])) throw ParseError(0, 0, "column map is not in row-major order");
  }
  sys.map = ErasureMap(rows, cols, cells);
  for (std::size_t k = 0; k < h; ++k) {
    Signature sig;
    for (auto z : gamma[k].support()) sig.push_back(static_cast<std::uint32_t>(z));
    if (sig.empty()) throw ParseError(k + 2, 0, "Gamma row without entries");
    const std::size_t row = sys.map[sig.front()].row;
    for (auto z : sig) {
      if (sys.map[z].row != row) throw ParseError(k + 2, 0, "Gamma row spans several test rows");
    }
    sys.rows.push_back(std::move(sig));
    sys.source.push_back({0, row});
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Samples and outcomes

inline std::string write_samples(const SampleSet& samples, std::size_t n, std::size_t t) {
  std::string out = std::to_string(samples.size()) + " " + std::to_string(n) + " " + std::to_string(t) + "\n";
  for (std::size_t k = 0; k < samples.size(); ++k) {
    out += samples.inputs[k].to_string() + " " + samples.outcomes[k].to_string() + "\n";
  }
  return out;
}

inline SampleSet parse_samples(std::string_view text) {
  detail::LineReader in(text);
  const auto header = detail::fields(in.require("header"));
  if (header.size() != 3) throw ParseError(1, 0, "header must be \"s n t\"");
  const auto s = detail::parse_count(header[0], 1, "sample count");
  const auto n = detail::parse_count(header[1], 1, "item count");
  const auto t = detail::parse_count(header[2], 1, "test count");
  SampleSet out;
  for (std::size_t k = 0; k < s; ++k) {
    const auto f = detail::fields(in.require("sample line"));
    if (f.size() != 2) throw ParseError(in.line_no(), 0, "expected \"<x bits> <y bits>\"");
    out.inputs.push_back(detail::parse_bits(f[0], n, in.line_no()));
    out.outcomes.push_back(detail::parse_bits(f[1], t, in.line_no()));
  }
  if (in.next_nonblank()) throw ParseError(in.line_no(), 0, "trailing content after the samples");
  return out;
}

inline std::string write_outcome(const OutcomeVector& y) { return y.to_string() + "\n"; }

inline OutcomeVector parse_outcome(std::string_view text) {
  detail::LineReader in(text);
  const auto line = in.next_nonblank();
  if (!line) throw ParseError(1, 0, "empty outcome file");
  const auto f = detail::fields(*line);
  if (f.size() != 1) throw ParseError(in.line_no(), 0, "expected one bit string");
  return detail::parse_bits(f[0], f[0].size(), in.line_no());
}

}  // namespace gtmc::io
