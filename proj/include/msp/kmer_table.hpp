#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "msp/kmer.hpp"

namespace msp {

/// Linear-probing map from k-mer to a non-zero 64-bit value (ordinals and
/// vertex ids both start at 1, so 0 marks an empty slot).
template <std::size_t W>
class KmerTable {
 public:
  static constexpr std::size_t kEntryBytes = sizeof(KmerKey<W>) + sizeof(std::uint64_t);

  explicit KmerTable(std::size_t expected = 0) { reserve(expected); }

  void reserve(std::size_t expected) {
    std::size_t want = std::bit_ceil(std::max<std::size_t>(16, expected + expected / 2 + 1));
    if (want > values_.size()) rehash(want);
  }

  /// Inserts (key, value) if absent. Returns the stored value and whether it was inserted.
  std::pair<std::uint64_t, bool> try_emplace(const KmerKey<W>& key, std::uint64_t value) {
    if ((size_ + 1) * 10 > values_.size() * 7) rehash(values_.size() * 2);
    std::size_t slot = key.hash() & (values_.size() - 1);
    while (values_[slot] != 0) {
      if (keys_[slot] == key) return {values_[slot], false};
      slot = (slot + 1) & (values_.size() - 1);
    }
    keys_[slot] = key;
    values_[slot] = value;
    ++size_;
    return {value, true};
  }

  std::uint64_t find(const KmerKey<W>& key) const noexcept {
    std::size_t slot = key.hash() & (values_.size() - 1);
    while (values_[slot] != 0) {
      if (keys_[slot] == key) return values_[slot];
      slot = (slot + 1) & (values_.size() - 1);
    }
    return 0;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] != 0) f(keys_[i], values_[i]);
    }
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return values_.size(); }
  std::size_t memory_bytes() const noexcept { return values_.size() * kEntryBytes; }

  void clear() {
    std::vector<KmerKey<W>>().swap(keys_);
    std::vector<std::uint64_t>().swap(values_);
    size_ = 0;
    reserve(0);
  }

 private:
  void rehash(std::size_t capacity) {
    std::vector<KmerKey<W>> old_keys(capacity);
    std::vector<std::uint64_t> old_values(capacity, 0);
    old_keys.swap(keys_);
    old_values.swap(values_);
    for (std::size_t i = 0; i < old_values.size(); ++i) {
      if (old_values[i] == 0) continue;
      std::size_t slot = old_keys[i].hash() & (capacity - 1);
      while (values_[slot] != 0) slot = (slot + 1) & (capacity - 1);
      keys_[slot] = old_keys[i];
      values_[slot] = old_values[i];
    }
  }

  std::vector<KmerKey<W>> keys_;
  std::vector<std::uint64_t> values_;
  std::size_t size_ = 0;
};

}  // namespace msp
