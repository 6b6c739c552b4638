#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "msp/sequence.hpp"

namespace msp {

inline constexpr unsigned kMaxK = 128;
inline constexpr unsigned kMaxP = 32;

constexpr std::size_t kmer_words(unsigned k) noexcept { return (2 * static_cast<std::size_t>(k) + 63) / 64; }

/// Fixed-width k-mer value. The k-mer occupies the low 2k bits of a
/// big-endian multi-word integer (words[0] most significant), so the
/// defaulted ordering is lexicographic for k-mers of the same length.
template <std::size_t W>
struct KmerKey {
  std::array<std::uint64_t, W> words{};

  friend auto operator<=>(const KmerKey&, const KmerKey&) = default;

  Code base(unsigned i, unsigned k) const noexcept {
    const unsigned bit = 2 * (k - 1 - i);
    return static_cast<Code>((words[W - 1 - bit / 64] >> (bit % 64)) & 3u);
  }

  /// Drops the first base and appends `c`.
  void roll_forward(Code c, unsigned k) noexcept {
    for (std::size_t i = 0; i + 1 < W; ++i) words[i] = (words[i] << 2) | (words[i + 1] >> 62);
    words[W - 1] = (words[W - 1] << 2) | c;
    mask(k);
  }

  /// Maintains the reverse complement while the forward k-mer rolls with `c`.
  void roll_reverse(Code c, unsigned k) noexcept {
    for (std::size_t i = W - 1; i > 0; --i) words[i] = (words[i] >> 2) | (words[i - 1] << 62);
    words[0] >>= 2;
    const unsigned bit = 2 * (k - 1);
    words[W - 1 - bit / 64] |= static_cast<std::uint64_t>(complement(c)) << (bit % 64);
  }

  void mask(unsigned k) noexcept {
    const unsigned top_bits = 2 * k - 64 * (W - 1);
    if (top_bits < 64) words[0] &= (std::uint64_t{1} << top_bits) - 1;
  }

  std::uint64_t hash() const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (auto w : words) {
      h ^= w + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
      h ^= h >> 33;
      h *= 0xFF51AFD7ED558CCDULL;
      h ^= h >> 33;
    }
    return h;
  }

  PackedSequence to_packed(unsigned k) const {
    PackedSequence s(k);
    for (unsigned i = 0; i < k; ++i) s.set(i, base(i, k));
    return s;
  }

  static KmerKey from(const PackedSequence& s, std::size_t pos, unsigned k) noexcept {
    KmerKey key;
    for (unsigned i = 0; i < k; ++i) key.roll_forward(s[pos + i], k);
    return key;
  }
};

/// Rolls forward, reverse-complement and canonical forms along a sequence.
template <std::size_t W>
class KmerRoller {
 public:
  explicit KmerRoller(unsigned k) : k_(k) {}

  void reset() noexcept {
    fwd_ = {};
    rev_ = {};
    filled_ = 0;
  }
  /// Returns true once a full k-mer is available.
  bool push(Code c) noexcept {
    fwd_.roll_forward(c, k_);
    rev_.roll_reverse(c, k_);
    if (filled_ < k_) ++filled_;
    return filled_ == k_;
  }
  const KmerKey<W>& forward() const noexcept { return fwd_; }
  const KmerKey<W>& reverse() const noexcept { return rev_; }
  const KmerKey<W>& canonical() const noexcept { return rev_ < fwd_ ? rev_ : fwd_; }
  const KmerKey<W>& key(bool rc_mode) const noexcept { return rc_mode ? canonical() : fwd_; }

 private:
  unsigned k_;
  KmerKey<W> fwd_{};
  KmerKey<W> rev_{};
  unsigned filled_ = 0;
};

/// Invokes `f(std::integral_constant<std::size_t, W>{})` with the smallest
/// word count able to hold a k-mer of length k.
template <class F>
decltype(auto) with_kmer_width(unsigned k, F&& f) {
  if (k == 0 || k > kMaxK) throw std::invalid_argument("k must be in [1, " + std::to_string(kMaxK) + "]");
  switch (kmer_words(k)) {
    case 1: return f(std::integral_constant<std::size_t, 1>{});
    case 2: return f(std::integral_constant<std::size_t, 2>{});
    case 3: return f(std::integral_constant<std::size_t, 3>{});
    default: return f(std::integral_constant<std::size_t, 4>{});
  }
}

}  // namespace msp
