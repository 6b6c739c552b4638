#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "msp/io.hpp"
#include "msp/minimizer.hpp"
#include "msp/read_stream.hpp"
#include "msp/sequence.hpp"

namespace msp {

/// How minimizers are folded into t partitions.
enum class WrapMode : std::uint8_t {
  hash,      // wrap_hash(minimizer, t)
  identity,  // packed minimizer value mod t; t = 4^p gives one file per minimizer
};

std::string_view to_string(WrapMode mode) noexcept;
WrapMode parse_wrap_mode(std::string_view name);

struct PartitionConfig {
  unsigned k = 59;
  unsigned p = 12;
  std::uint32_t t = 1000;
  bool rc_mode = true;
  Scanner scanner = Scanner::simple;
  WrapMode wrap = WrapMode::hash;
  std::filesystem::path work_dir = "msp-work";
  std::uint64_t memory_budget = std::uint64_t{4} << 30;  // bytes, advisory
  unsigned threads = 1;

  /// Throws std::invalid_argument unless 1 <= p <= k <= 128, p <= 32, t >= 1.
  void validate() const;
};

/// Multiplies the packed minimizer by a fixed odd constant and reduces the
/// high 32 bits of the product modulo t.
inline constexpr std::uint64_t kWrapMultiplier = 0x9E3779B97F4A7C15ULL;
std::uint32_t wrap_hash(std::uint64_t minimizer_value, std::uint32_t t) noexcept;
std::uint32_t wrap_hash(const PackedSequence& minimizer, std::uint32_t t);
std::uint32_t partition_of(std::uint64_t minimizer_value, std::uint32_t t, WrapMode mode) noexcept;

// ---------------------------------------------------------------------------
// Partition files.
//
// A partition file is a sequence of records with no header:
//   u64 LE  start_ordinal
//   u32 LE  length in bases
//   ceil(length/4) bytes of 2-bit codes, first base in the high bits
// Records appear in strictly increasing start_ordinal order.

struct PartitionRecord {
  std::uint64_t start_ordinal = 0;
  PackedSequence sequence;

  friend bool operator==(const PartitionRecord&, const PartitionRecord&) = default;
};

class PartitionWriter {
 public:
  PartitionWriter() = default;
  PartitionWriter(const std::filesystem::path& path, std::uint32_t index, std::size_t buffer_bytes = 1 << 16);

  /// Appends bases [pos, pos+len) of `read` as one record.
  void append(std::uint64_t start_ordinal, const PackedSequence& read, std::size_t pos, std::size_t len);
  void close() { out_.close(); }

  std::uint64_t records() const noexcept { return records_; }
  std::uint64_t bases() const noexcept { return bases_; }
  std::uint64_t bytes() const noexcept { return out_.bytes_written(); }

 private:
  BinaryWriter out_;
  std::vector<std::uint8_t> scratch_;
  std::uint64_t records_ = 0;
  std::uint64_t bases_ = 0;
  std::uint64_t last_ordinal_ = 0;
};

class PartitionReader {
 public:
  explicit PartitionReader(const std::filesystem::path& path) : in_(path) {}
  bool next(PartitionRecord& record);

 private:
  BinaryReader in_;
  std::vector<std::uint8_t> scratch_;
};

std::vector<PartitionRecord> read_partition_file(const std::filesystem::path& path);

/// Partition i lives at <work_dir>/partitions/<i/256>/part-<i>.msp.
std::filesystem::path partition_path(const std::filesystem::path& work_dir, std::uint32_t index);
/// Read length sidecar: one u32 LE length (bases) per participating read.
std::filesystem::path read_lengths_path(const std::filesystem::path& work_dir);

struct PartitionSummary {
  std::uint64_t records = 0;
  std::uint64_t bases = 0;
  std::uint64_t bytes = 0;
  std::uint64_t kmers = 0;
};

struct PartitionResult {
  std::uint64_t reads = 0;          // reads that produced at least one k-mer
  std::uint64_t skipped_reads = 0;  // reads shorter than k
  std::uint64_t input_bases = 0;    // bases of participating reads
  std::uint64_t total_kmers = 0;    // N
  std::uint64_t breaks = 0;
  std::uint64_t comparisons = 0;
  std::vector<PartitionSummary> partitions;

  std::uint64_t partition_bases() const noexcept;
  std::uint64_t partition_bytes() const noexcept;
};

/// Scatters every read's super k-mers into t partition files under
/// cfg.work_dir and writes the read length sidecar. The k-mer at offset j of
/// the i-th participating read receives ordinal 1 + (k-mers in earlier reads) + j.
PartitionResult msp_partition(ReadStream& reads, const PartitionConfig& cfg);

// ---------------------------------------------------------------------------
// Baseline scatter/gather schemes. Both produce an id stream: one u64 LE
// vertex id per k-mer occurrence in ordinal order.

struct BaselineConfig {
  unsigned k = 59;
  std::uint32_t t = 1000;
  bool rc_mode = true;
  std::filesystem::path work_dir = "msp-work";
  std::uint64_t memory_budget = std::uint64_t{1} << 30;
  /// B-Partition only: bucket on the last `suffix_symbols` bases instead of a
  /// hash of the whole k-mer (0 = whole k-mer).
  unsigned suffix_symbols = 0;
};

struct BaselineResult {
  std::uint64_t reads = 0;
  std::uint64_t total_kmers = 0;
  std::uint64_t distinct_kmers = 0;
  std::uint64_t spill_bytes = 0;        // bytes written to partition/spill files
  std::uint64_t peak_table_entries = 0;  // largest per-partition hash table
  std::filesystem::path id_stream;
};

/// Horizontal partitioning: t equal read chunks, per-chunk local ids, sorted
/// spill files merged so each k-mer takes its id from the first chunk that
/// contains it (offset by the distinct counts of earlier chunks).
BaselineResult h_partition(ReadStream& reads, const BaselineConfig& cfg);

/// Bucket partitioning: every k-mer occurrence is sent to bucket H(kmer) mod t;
/// bucket j numbers its distinct k-mers after those of buckets 0..j-1.
BaselineResult b_partition(ReadStream& reads, const BaselineConfig& cfg);

}  // namespace msp
