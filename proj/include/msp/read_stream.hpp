#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "msp/sequence.hpp"

namespace msp {

/// Rewindable single-pass source of ACGT-only reads.
class ReadStream {
 public:
  virtual ~ReadStream() = default;
  virtual bool next(PackedSequence& read) = 0;
  virtual void rewind() = 0;
};

class VectorReadStream : public ReadStream {
 public:
  explicit VectorReadStream(std::vector<PackedSequence> reads) : reads_(std::move(reads)) {}
  /// Packs each string; throws SequenceError on non-ACGT input.
  static VectorReadStream from_strings(const std::vector<std::string>& reads);

  bool next(PackedSequence& read) override;
  void rewind() override { pos_ = 0; }
  const std::vector<PackedSequence>& reads() const noexcept { return reads_; }

 private:
  std::vector<PackedSequence> reads_;
  std::size_t pos_ = 0;
};

/// Uniform i.i.d. reads (the random string model), reproducible from `seed`.
class RandomReadStream : public ReadStream {
 public:
  RandomReadStream(std::uint64_t count, std::size_t length, std::uint64_t seed);

  bool next(PackedSequence& read) override;
  void rewind() override;

 private:
  std::uint64_t count_;
  std::size_t length_;
  std::uint64_t seed_;
  std::uint64_t emitted_ = 0;
  std::mt19937_64 rng_;
};

/// Reads sampled from a fixed random genome, each taken from a random strand,
/// so that k-mers recur across reads and between strands.
class GenomeSampleStream : public ReadStream {
 public:
  GenomeSampleStream(std::size_t genome_length, std::uint64_t count, std::size_t min_length, std::size_t max_length,
                     std::uint64_t seed);

  bool next(PackedSequence& read) override;
  void rewind() override;
  const PackedSequence& genome() const noexcept { return genome_; }

 private:
  PackedSequence genome_;
  PackedSequence genome_rc_;
  std::uint64_t count_;
  std::size_t min_length_;
  std::size_t max_length_;
  std::uint64_t seed_;
  std::uint64_t emitted_ = 0;
  std::mt19937_64 rng_;
};

PackedSequence random_sequence(std::size_t length, std::mt19937_64& rng);

/// Drains a stream into memory (test and oracle helper).
std::vector<PackedSequence> collect_reads(ReadStream& reads);

}  // namespace msp
