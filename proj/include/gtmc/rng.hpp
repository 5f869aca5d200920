#pragma once

// Counter-based, splittable random stream.
//
// A stream is a (key, counter) pair; the k-th draw is a bijective mix of
// key + k * gamma, so a stream's output depends only on its key and how many
// values were drawn from it. Substreams are derived from a parent key and a
// (label, index) pair, which lets parallel trials draw from independent
// streams regardless of scheduling.

#include <cstdint>
#include <limits>
#include <string_view>

namespace gtmc {

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace detail

class RngStream {
 public:
  using result_type = std::uint64_t;

  constexpr RngStream() noexcept : RngStream(0) {}
  constexpr explicit RngStream(std::uint64_t seed) noexcept
      : key_(detail::mix64(seed ^ 0x6A09E667F3BCC909ULL)) {}

  /// Root stream for a named purpose, e.g. RngStream(seed, "matrix").
  constexpr RngStream(std::uint64_t seed, std::string_view label) noexcept
      : RngStream(RngStream(seed).split(label)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGoldenGamma);
  }

  /// Independent child stream keyed by (label, index). Does not advance this
  /// stream.
  constexpr RngStream split(std::string_view label,
                            std::uint64_t index = 0) const noexcept {
    std::uint64_t k = detail::mix64(key_ ^ detail::fnv1a(label));
    k = detail::mix64(k + (index + 1) * 0xD1B54A32D192ED03ULL);
    return RngStream(KeyTag{}, k);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// True with probability p; p <= 0 never, p >= 1 always.
  constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform integer in [0, bound). bound must be positive.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection.
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

  friend constexpr bool operator==(const RngStream&, const RngStream&) = default;

 private:
  struct KeyTag {};
  constexpr RngStream(KeyTag, std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace gtmc
