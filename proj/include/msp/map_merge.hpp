#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "msp/io.hpp"
#include "msp/partitioning.hpp"
#include "msp/read_stream.hpp"

namespace msp {

/// `count` consecutive ordinals starting at from_start take the ids of the
/// ordinals starting at to_start. Stored as u64 LE from_start, u64 LE
/// to_start, u32 LE count (20 bytes).
struct ReplacementRange {
  std::uint64_t from_start = 0;
  std::uint64_t to_start = 0;
  std::uint32_t count = 0;

  friend bool operator==(const ReplacementRange&, const ReplacementRange&) = default;
};

/// Accumulates single replacements and coalesces runs whose sources and
/// targets both advance by one.
class RangeCoalescer {
 public:
  /// Returns a finished range when `from -> to` cannot extend the pending one.
  bool add(std::uint64_t from, std::uint64_t to, ReplacementRange& finished);
  bool finish(ReplacementRange& finished);

 private:
  ReplacementRange pending_;
};

class ReplacementWriter {
 public:
  ReplacementWriter() = default;
  explicit ReplacementWriter(const std::filesystem::path& path);

  void add(std::uint64_t from, std::uint64_t to);
  void close();

  std::uint64_t ranges() const noexcept { return ranges_; }
  std::uint64_t replaced() const noexcept { return replaced_; }
  std::uint64_t bytes() const noexcept { return out_.bytes_written(); }

 private:
  void put(const ReplacementRange& r);

  BinaryWriter out_;
  RangeCoalescer coalescer_;
  std::uint64_t ranges_ = 0;
  std::uint64_t replaced_ = 0;
};

class ReplacementReader {
 public:
  explicit ReplacementReader(const std::filesystem::path& path) : in_(path, 1 << 14) {}
  bool next(ReplacementRange& range);

 private:
  BinaryReader in_;
};

std::vector<ReplacementRange> read_replacement_file(const std::filesystem::path& path);
void write_replacement_file(const std::filesystem::path& path, std::span<const ReplacementRange> ranges);

/// <work_dir>/replacements/<i/256>/repl-<i>.bin
std::filesystem::path replacement_path(const std::filesystem::path& work_dir, std::uint32_t index);

struct MapResult {
  std::uint64_t kmers = 0;           // occurrences in the partition
  std::uint64_t distinct_kmers = 0;  // peak table entries
  std::uint64_t ranges = 0;
  std::uint64_t replaced = 0;        // occurrences covered by ranges
  std::uint64_t table_bytes = 0;
};

/// Maps one partition: each k-mer's first ordinal becomes its id, and every
/// later occurrence is written as a replacement towards it. `expected_kmers`
/// pre-sizes the table. Throws std::runtime_error naming the partition when
/// the table would exceed `memory_budget`.
MapResult map_partition(const std::filesystem::path& partition_file, const std::filesystem::path& replacement_file,
                        unsigned k, bool rc_mode, std::uint64_t memory_budget = ~std::uint64_t{0},
                        std::uint64_t expected_kmers = 0);

/// In-memory form of map_partition for fixtures and oracles.
std::vector<ReplacementRange> map_records(std::span<const PartitionRecord> records, unsigned k, bool rc_mode,
                                          MapResult* stats = nullptr);

struct MergeResult {
  std::uint64_t kmers = 0;     // N
  std::uint64_t vertices = 0;  // ordinals left unreplaced
};

/// Writes the id stream for ordinals 1..N (u64 LE each) from replacement
/// files sorted by from_start. Overlapping or out-of-range records throw
/// std::runtime_error.
MergeResult merge_replacements(std::span<const std::filesystem::path> files, std::uint64_t total_kmers,
                               const std::filesystem::path& id_stream_out);

/// In-memory merge; ids[o-1] is the id of ordinal o.
std::vector<std::uint64_t> merge_ranges(std::span<const std::vector<ReplacementRange>> files, std::uint64_t total_kmers);

struct IdStream {
  std::vector<std::uint64_t> ids;
  std::vector<std::uint32_t> read_lengths;
};

std::vector<std::uint64_t> read_id_stream(const std::filesystem::path& path);
void write_id_stream(const std::filesystem::path& path, std::span<const std::uint64_t> ids);
std::vector<std::uint32_t> read_read_lengths(const std::filesystem::path& path);
IdStream load_id_stream(const std::filesystem::path& ids, const std::filesystem::path& read_lengths);

struct Edge {
  std::uint64_t u = 0;
  std::uint64_t v = 0;
  std::uint64_t weight = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Vertices sorted and unique; edges sorted by (u, v) with weight >= 1.
struct DeBruijnGraph {
  std::vector<std::uint64_t> vertices;
  std::vector<Edge> edges;

  friend bool operator==(const DeBruijnGraph&, const DeBruijnGraph&) = default;
};

/// Adjacent occurrences within each read add one to their edge. Throws
/// std::runtime_error when the id count differs from sum(m_i - k + 1).
DeBruijnGraph emit_edges(const IdStream& stream, unsigned k);

struct EdgeFileResult {
  std::uint64_t vertices = 0;
  std::uint64_t edges = 0;
  std::uint64_t adjacencies = 0;
  bool spilled = false;
};

/// Streams the id stream and read lengths from disk and writes "u v weight"
/// lines sorted by (u, v). Aggregates in memory and falls back to an external
/// sort under `temp_dir` once `memory_budget` is exceeded.
EdgeFileResult write_edge_list(const std::filesystem::path& id_stream, const std::filesystem::path& read_lengths,
                               unsigned k, const std::filesystem::path& out, const std::filesystem::path& temp_dir,
                               std::uint64_t memory_budget = std::uint64_t{1} << 30);

std::vector<Edge> read_edge_list(const std::filesystem::path& path);

struct ReferenceResult {
  DeBruijnGraph graph;
  std::vector<std::uint64_t> ids;  // first-occurrence ordinal per occurrence
  std::vector<std::uint32_t> read_lengths;
};

/// Single-pass in-memory builder: the independent oracle for the pipeline.
ReferenceResult reference_build(ReadStream& reads, unsigned k, bool rc_mode);

/// Renumbers ids to 1..V in order of first appearance.
std::vector<std::uint64_t> densify(std::span<const std::uint64_t> ids);
/// Replaces each vertex by its rank among the sorted vertices, which is the
/// order of first appearance when ids are first-occurrence ordinals.
DeBruijnGraph densify(const DeBruijnGraph& graph);

/// Relabels every occurrence with the ordinal of the first occurrence sharing
/// its id. Two id streams induce the same duplicate classes iff their
/// normalized forms are equal.
std::vector<std::uint64_t> normalize_classes(std::span<const std::uint64_t> ids);

}  // namespace msp
