#include "msp/read_stream.hpp"

#include <stdexcept>

namespace msp {

VectorReadStream VectorReadStream::from_strings(const std::vector<std::string>& reads) {
  std::vector<PackedSequence> packed;
  packed.reserve(reads.size());
  for (const auto& r : reads) packed.push_back(pack(r));
  return VectorReadStream(std::move(packed));
}

bool VectorReadStream::next(PackedSequence& read) {
  if (pos_ >= reads_.size()) return false;
  read = reads_[pos_++];
  return true;
}

PackedSequence random_sequence(std::size_t length, std::mt19937_64& rng) {
  PackedSequence s(length);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < length; ++i) {
    if (i % 32 == 0) bits = rng();
    s.set(i, static_cast<Code>(bits & 3u));
    bits >>= 2;
  }
  return s;
}

RandomReadStream::RandomReadStream(std::uint64_t count, std::size_t length, std::uint64_t seed)
    : count_(count), length_(length), seed_(seed), rng_(seed) {}

bool RandomReadStream::next(PackedSequence& read) {
  if (emitted_ >= count_) return false;
  ++emitted_;
  read = random_sequence(length_, rng_);
  return true;
}

void RandomReadStream::rewind() {
  emitted_ = 0;
  rng_.seed(seed_);
}

GenomeSampleStream::GenomeSampleStream(std::size_t genome_length, std::uint64_t count, std::size_t min_length,
                                       std::size_t max_length, std::uint64_t seed)
    : count_(count), min_length_(min_length), max_length_(max_length), seed_(seed), rng_(seed) {
  if (min_length == 0 || min_length > max_length || max_length > genome_length) {
    throw std::invalid_argument("read lengths must satisfy 0 < min <= max <= genome length");
  }
  std::mt19937_64 genome_rng(seed ^ 0xA5A5A5A5DEADBEEFULL);
  genome_ = random_sequence(genome_length, genome_rng);
  genome_rc_ = reverse_complement(genome_);
}

bool GenomeSampleStream::next(PackedSequence& read) {
  if (emitted_ >= count_) return false;
  ++emitted_;
  std::uniform_int_distribution<std::size_t> len_dist(min_length_, max_length_);
  const std::size_t len = len_dist(rng_);
  std::uniform_int_distribution<std::size_t> pos_dist(0, genome_.size() - len);
  const std::size_t pos = pos_dist(rng_);
  const bool reverse = (rng_() & 1u) != 0;
  read = (reverse ? genome_rc_ : genome_).subsequence(pos, len);
  return true;
}

void GenomeSampleStream::rewind() {
  emitted_ = 0;
  rng_.seed(seed_);
}

std::vector<PackedSequence> collect_reads(ReadStream& reads) {
  std::vector<PackedSequence> out;
  PackedSequence r;
  while (reads.next(r)) out.push_back(r);
  return out;
}

}  // namespace msp
