#include <cstdio>

#include "msp/kmer.hpp"
#include "msp/partitioning.hpp"

namespace msp {

std::string_view to_string(WrapMode mode) noexcept { return mode == WrapMode::identity ? "identity" : "hash"; }

WrapMode parse_wrap_mode(std::string_view name) {
  if (name == "hash") return WrapMode::hash;
  if (name == "identity") return WrapMode::identity;
  throw std::invalid_argument("unknown wrap mode '" + std::string(name) + "' (expected hash or identity)");
}

void PartitionConfig::validate() const {
  validate_kp(k, p);
  if (t == 0) throw std::invalid_argument("t must be at least 1");
  if (threads == 0) throw std::invalid_argument("threads must be at least 1");
}

std::uint32_t wrap_hash(std::uint64_t minimizer_value, std::uint32_t t) noexcept {
  const std::uint64_t mixed = minimizer_value * kWrapMultiplier;
  return static_cast<std::uint32_t>((mixed >> 32) % t);
}

std::uint32_t wrap_hash(const PackedSequence& minimizer, std::uint32_t t) {
  if (minimizer.size() > kMaxP) throw std::invalid_argument("minimizer longer than 32 bases");
  return wrap_hash(minimizer.value(), t);
}

std::uint32_t partition_of(std::uint64_t minimizer_value, std::uint32_t t, WrapMode mode) noexcept {
  return mode == WrapMode::identity ? static_cast<std::uint32_t>(minimizer_value % t) : wrap_hash(minimizer_value, t);
}

PartitionWriter::PartitionWriter(const std::filesystem::path& path, std::uint32_t index, std::size_t buffer_bytes)
    : out_(path, "partition " + std::to_string(index), buffer_bytes) {}

void PartitionWriter::append(std::uint64_t start_ordinal, const PackedSequence& read, std::size_t pos,
                             std::size_t len) {
  if (start_ordinal <= last_ordinal_) throw std::logic_error("partition records must have increasing ordinals");
  last_ordinal_ = start_ordinal;
  const std::size_t nbytes = (len + 3) / 4;
  scratch_.resize(12 + nbytes);
  store_le64(scratch_.data(), start_ordinal);
  store_le32(scratch_.data() + 8, static_cast<std::uint32_t>(len));
  std::uint8_t* dst = scratch_.data() + 12;
  const auto src = read.bytes();
  const std::size_t first = pos / 4;
  const unsigned shift = 2 * (pos % 4);
  if (shift == 0) {
    for (std::size_t i = 0; i < nbytes; ++i) dst[i] = src[first + i];
  } else {
    for (std::size_t i = 0; i < nbytes; ++i) {
      std::uint8_t b = static_cast<std::uint8_t>(src[first + i] << shift);
      if (first + i + 1 < src.size()) b |= static_cast<std::uint8_t>(src[first + i + 1] >> (8 - shift));
      dst[i] = b;
    }
  }
  if (len % 4 != 0) dst[nbytes - 1] &= static_cast<std::uint8_t>(0xFFu << (8 - 2 * (len % 4)));
  out_.write(scratch_.data(), scratch_.size());
  ++records_;
  bases_ += len;
}

bool PartitionReader::next(PartitionRecord& record) {
  std::uint8_t header[12];
  if (!in_.read(header, sizeof header)) return false;
  record.start_ordinal = load_le64(header);
  const std::uint32_t len = load_le32(header + 8);
  scratch_.resize((len + 3) / 4);
  if (!in_.read(scratch_.data(), scratch_.size()) && !scratch_.empty()) {
    throw IoError("truncated record in " + in_.path().string());
  }
  record.sequence = PackedSequence::from_bytes(scratch_, len);
  return true;
}

std::vector<PartitionRecord> read_partition_file(const std::filesystem::path& path) {
  PartitionReader reader(path);
  std::vector<PartitionRecord> out;
  PartitionRecord r;
  while (reader.next(r)) out.push_back(r);
  return out;
}

std::filesystem::path partition_path(const std::filesystem::path& work_dir, std::uint32_t index) {
  char shard[16];
  char name[32];
  std::snprintf(shard, sizeof shard, "%03u", index / 256);
  std::snprintf(name, sizeof name, "part-%05u.msp", index);
  return work_dir / "partitions" / shard / name;
}

std::filesystem::path read_lengths_path(const std::filesystem::path& work_dir) { return work_dir / "reads.len"; }

std::uint64_t PartitionResult::partition_bases() const noexcept {
  std::uint64_t total = 0;
  for (const auto& p : partitions) total += p.bases;
  return total;
}

std::uint64_t PartitionResult::partition_bytes() const noexcept {
  std::uint64_t total = 0;
  for (const auto& p : partitions) total += p.bytes;
  return total;
}

}  // namespace msp
