#pragma once

// Dense bit-packed vectors and row-major matrices over {0,1}.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gtmc/error.hpp"

namespace gtmc {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) noexcept {
  return (bits + kWordBits - 1) / kWordBits;
}

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_(words_for(size)) {}

  static BitVector from_support(std::size_t size,
                                std::span<const std::size_t> support) {
    BitVector v(size);
    for (std::size_t j : support) {
      if (j >= size) throw IndexOutOfRange("support index beyond vector length");
      v.set(j);
    }
    return v;
  }

  static BitVector from_support(std::size_t size,
                                std::initializer_list<std::size_t> support) {
    return from_support(size, std::span<const std::size_t>(support.begin(), support.size()));
  }

  /// Parses a string of '0'/'1' characters.
  static BitVector from_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t j = 0; j < bits.size(); ++j) {
      if (bits[j] == '1') {
        v.set(j);
      } else if (bits[j] != '0') {
        throw DomainError("bit string contains a character other than 0/1");
      }
    }
    return v;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool get(std::size_t j) const noexcept {
    return (words_[j / kWordBits] >> (j % kWordBits)) & 1U;
  }
  bool operator[](std::size_t j) const noexcept { return get(j); }

  void set(std::size_t j, bool value = true) noexcept {
    const Word mask = Word{1} << (j % kWordBits);
    if (value) {
      words_[j / kWordBits] |= mask;
    } else {
      words_[j / kWordBits] &= ~mask;
    }
  }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool any() const noexcept {
    return std::any_of(words_.begin(), words_.end(), [](Word w) { return w != 0; });
  }

  bool intersects(const BitVector& other) const noexcept {
    const std::size_t n = std::min(words_.size(), other.words_.size());
    for (std::size_t k = 0; k < n; ++k) {
      if (words_[k] & other.words_[k]) return true;
    }
    return false;
  }

  /// True when every set bit of this vector is also set in `other`.
  bool is_subset_of(const BitVector& other) const noexcept {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      if (words_[k] & ~other.words_[k]) return false;
    }
    return true;
  }

  BitVector& operator|=(const BitVector& other) {
    if (other.size_ != size_) throw DimensionMismatch("bit vector OR of unequal lengths");
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= other.words_[k];
    return *this;
  }

  BitVector& operator&=(const BitVector& other) {
    if (other.size_ != size_) throw DimensionMismatch("bit vector AND of unequal lengths");
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= other.words_[k];
    return *this;
  }

  friend BitVector operator|(BitVector a, const BitVector& b) { return a |= b; }
  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }

  /// Sorted indices of set bits.
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for (std::size_t k = 0; k < words_.size(); ++k) {
      Word w = words_[k];
      while (w) {
        out.push_back(k * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
    return out;
  }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t j = 0; j < size_; ++j) {
      if (get(j)) s[j] = '1';
    }
    return s;
  }

  std::span<const Word> words() const noexcept { return words_; }
  std::span<Word> words() noexcept { return words_; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

  /// Lexicographic order on the sorted support.
  friend bool support_less(const BitVector& a, const BitVector& b) {
    return std::ranges::lexicographical_compare(a.support(), b.support());
  }

 private:
  std::size_t size_ = 0;
  std::vector<Word> words_;
};

/// Row-major dense binary matrix; each row starts on a word boundary.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_(words_for(cols)), data_(rows * stride_) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t stride() const noexcept { return stride_; }

  bool get(std::size_t i, std::size_t j) const noexcept {
    return (data_[i * stride_ + j / kWordBits] >> (j % kWordBits)) & 1U;
  }

  void set(std::size_t i, std::size_t j, bool value = true) noexcept {
    Word& w = data_[i * stride_ + j / kWordBits];
    const Word mask = Word{1} << (j % kWordBits);
    w = value ? (w | mask) : (w & ~mask);
  }

  std::span<const Word> row(std::size_t i) const noexcept {
    return {data_.data() + i * stride_, stride_};
  }
  std::span<Word> row(std::size_t i) noexcept {
    return {data_.data() + i * stride_, stride_};
  }

  BitVector row_vector(std::size_t i) const {
    BitVector v(cols_);
    std::ranges::copy(row(i), v.words().begin());
    return v;
  }

  /// True when row i and `v` share a set bit.
  bool row_intersects(std::size_t i, const BitVector& v) const noexcept {
    const Word* r = data_.data() + i * stride_;
    const auto w = v.words();
    for (std::size_t k = 0; k < stride_; ++k) {
      if (r[k] & w[k]) return true;
    }
    return false;
  }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (Word w : data_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::vector<Word> data_;
};

}  // namespace gtmc
