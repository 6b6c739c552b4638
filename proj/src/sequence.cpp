#include "msp/sequence.hpp"

#include <algorithm>
#include <cstring>

namespace msp {

PackedSequence::PackedSequence(std::size_t length) : bytes_((length + 3) / 4, 0), length_(length) {}

PackedSequence PackedSequence::from_codes(std::span<const Code> codes) {
  PackedSequence s(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) s.set(i, codes[i]);
  return s;
}

PackedSequence PackedSequence::from_bytes(std::span<const std::uint8_t> bytes, std::size_t length) {
  if (bytes.size() != (length + 3) / 4) throw std::invalid_argument("packed payload size does not match length");
  PackedSequence s;
  s.bytes_.assign(bytes.begin(), bytes.end());
  s.length_ = length;
  if (length % 4 != 0) s.bytes_.back() &= static_cast<std::uint8_t>(0xFFu << (8 - 2 * (length % 4)));
  return s;
}

PackedSequence PackedSequence::from_value(std::uint64_t value, std::size_t length) {
  PackedSequence s(length);
  for (std::size_t i = 0; i < length; ++i) s.set(i, static_cast<Code>((value >> (2 * (length - 1 - i))) & 3u));
  return s;
}

void PackedSequence::set(std::size_t i, Code c) noexcept {
  const unsigned shift = 6 - 2 * (i & 3);
  auto& b = bytes_[i >> 2];
  b = static_cast<std::uint8_t>((b & ~(3u << shift)) | ((c & 3u) << shift));
}

void PackedSequence::push_back(Code c) {
  if ((length_ & 3) == 0) bytes_.push_back(0);
  ++length_;
  set(length_ - 1, c);
}

PackedSequence PackedSequence::subsequence(std::size_t pos, std::size_t len) const {
  if (pos + len > length_) throw std::out_of_range("subsequence beyond end of sequence");
  PackedSequence out(len);
  if ((pos & 3) == 0) {
    std::memcpy(out.bytes_.data(), bytes_.data() + pos / 4, out.bytes_.size());
    if (len % 4 != 0) out.bytes_.back() &= static_cast<std::uint8_t>(0xFFu << (8 - 2 * (len % 4)));
    return out;
  }
  for (std::size_t i = 0; i < len; ++i) out.set(i, (*this)[pos + i]);
  return out;
}

std::uint64_t PackedSequence::value_at(std::size_t pos, std::size_t len) const noexcept {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < len; ++i) v = (v << 2) | (*this)[pos + i];
  return v;
}

std::vector<Code> PackedSequence::codes() const {
  std::vector<Code> out(length_);
  for (std::size_t i = 0; i < length_; ++i) out[i] = (*this)[i];
  return out;
}

std::string PackedSequence::to_string() const {
  std::string out(length_, 'A');
  for (std::size_t i = 0; i < length_; ++i) out[i] = decode_base((*this)[i]);
  return out;
}

std::strong_ordering operator<=>(const PackedSequence& a, const PackedSequence& b) noexcept {
  const int c = compare(a, b);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

int compare(const PackedSequence& a, const PackedSequence& b) noexcept {
  const std::size_t common = std::min(a.size(), b.size());
  const std::size_t full = common / 4;
  if (full > 0) {
    const int c = std::memcmp(a.bytes().data(), b.bytes().data(), full);
    if (c != 0) return c < 0 ? -1 : 1;
  }
  for (std::size_t i = full * 4; i < common; ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

PackedSequence pack(std::string_view bases) {
  PackedSequence s(bases.size());
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const Code c = encode_base(bases[i]);
    if (c > 3) {
      throw SequenceError("non-ACGT character '" + std::string(1, bases[i]) + "' at position " + std::to_string(i), i);
    }
    s.set(i, c);
  }
  return s;
}

std::string unpack(const PackedSequence& s) { return s.to_string(); }

PackedSequence reverse_complement(const PackedSequence& s) {
  const std::size_t n = s.size();
  PackedSequence out(n);
  for (std::size_t i = 0; i < n; ++i) out.set(n - 1 - i, complement(s[i]));
  return out;
}

PackedSequence canonical_kmer(const PackedSequence& kmer) {
  PackedSequence rc = reverse_complement(kmer);
  return compare(rc, kmer) < 0 ? rc : kmer;
}

std::uint64_t reverse_complement_value(std::uint64_t value, unsigned len) noexcept {
  if (len == 0) return 0;
  std::uint64_t v = ~value;
  // Reverse the order of the 32 two-bit groups.
  v = ((v >> 2) & 0x3333333333333333ULL) | ((v & 0x3333333333333333ULL) << 2);
  v = ((v >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((v & 0x0F0F0F0F0F0F0F0FULL) << 4);
  v = ((v >> 8) & 0x00FF00FF00FF00FFULL) | ((v & 0x00FF00FF00FF00FFULL) << 8);
  v = ((v >> 16) & 0x0000FFFF0000FFFFULL) | ((v & 0x0000FFFF0000FFFFULL) << 16);
  v = (v >> 32) | (v << 32);
  return v >> (64 - 2 * len);
}

std::vector<std::string_view> split_acgt_runs(std::string_view bases) {
  std::vector<std::string_view> runs;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= bases.size(); ++i) {
    if (i == bases.size() || encode_base(bases[i]) > 3) {
      if (i > start) runs.push_back(bases.substr(start, i - start));
      start = i + 1;
    }
  }
  return runs;
}

}  // namespace msp
