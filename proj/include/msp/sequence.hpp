#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace msp {

/// 2-bit nucleotide code. The mapping A=0, C=1, G=2, T=3 is order preserving,
/// so comparing packed values compares the underlying strings lexicographically.
using Code = std::uint8_t;

inline constexpr Code kBaseA = 0;
inline constexpr Code kBaseC = 1;
inline constexpr Code kBaseG = 2;
inline constexpr Code kBaseT = 3;

constexpr Code complement(Code c) noexcept { return static_cast<Code>(3u - c); }

/// Returns 0..3 for ACGT (either case), 4 for anything else.
constexpr Code encode_base(char c) noexcept {
  switch (c) {
    case 'A': case 'a': return kBaseA;
    case 'C': case 'c': return kBaseC;
    case 'G': case 'g': return kBaseG;
    case 'T': case 't': return kBaseT;
    default: return 4;
  }
}

constexpr char decode_base(Code c) noexcept { return "ACGT"[c & 3u]; }

/// Raised when a character outside {A,C,G,T} reaches the packer.
class SequenceError : public std::invalid_argument {
 public:
  SequenceError(const std::string& what, std::size_t position)
      : std::invalid_argument(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// DNA string stored four bases per byte, first base in the two most
/// significant bits. Unused trailing bits are always zero, which keeps
/// byte-wise comparison of equal-length sequences lexicographic.
class PackedSequence {
 public:
  PackedSequence() = default;
  explicit PackedSequence(std::size_t length);

  static PackedSequence from_codes(std::span<const Code> codes);
  /// Adopts an on-disk payload of ceil(length/4) bytes.
  static PackedSequence from_bytes(std::span<const std::uint8_t> bytes, std::size_t length);
  /// Low 2*length bits of `value`, most significant base first (length <= 32).
  static PackedSequence from_value(std::uint64_t value, std::size_t length);

  std::size_t size() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }

  Code operator[](std::size_t i) const noexcept {
    return static_cast<Code>((bytes_[i >> 2] >> (6 - 2 * (i & 3))) & 3u);
  }
  void set(std::size_t i, Code c) noexcept;
  void push_back(Code c);
  void clear() noexcept {
    bytes_.clear();
    length_ = 0;
  }
  void reserve(std::size_t length) { bytes_.reserve((length + 3) / 4); }

  PackedSequence subsequence(std::size_t pos, std::size_t len) const;
  /// Packs s[pos, pos+len) into an integer, len <= 32.
  std::uint64_t value_at(std::size_t pos, std::size_t len) const noexcept;
  /// Whole sequence as an integer; requires size() <= 32.
  std::uint64_t value() const noexcept { return value_at(0, length_); }

  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }
  std::vector<Code> codes() const;
  std::string to_string() const;

  friend std::strong_ordering operator<=>(const PackedSequence& a, const PackedSequence& b) noexcept;
  friend bool operator==(const PackedSequence& a, const PackedSequence& b) noexcept {
    return a.length_ == b.length_ && a.bytes_ == b.bytes_;
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t length_ = 0;
};

/// Throws SequenceError naming the first non-ACGT position.
PackedSequence pack(std::string_view bases);
std::string unpack(const PackedSequence& s);

/// Three-way lexicographic comparison: negative, zero or positive.
int compare(const PackedSequence& a, const PackedSequence& b) noexcept;

PackedSequence reverse_complement(const PackedSequence& s);

/// min(kmer, reverse_complement(kmer)) under lexicographic order.
PackedSequence canonical_kmer(const PackedSequence& kmer);

/// Reverse complement of the low 2*len bits of `value` (len <= 32).
std::uint64_t reverse_complement_value(std::uint64_t value, unsigned len) noexcept;

/// Maximal runs of ACGT characters; everything else acts as a separator.
std::vector<std::string_view> split_acgt_runs(std::string_view bases);

struct ShortRead {
  std::uint64_t ordinal_base = 1;  // global ordinal of the first k-mer
  PackedSequence sequence;
};

}  // namespace msp
