#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <string>
#include <vector>

#include "msp/read_stream.hpp"

namespace msp {

struct IngestStats {
  std::uint64_t records = 0;        // FASTA/FASTQ records read
  std::uint64_t reads = 0;          // ACGT runs emitted
  std::uint64_t split_records = 0;  // records that contained a non-ACGT base
  std::uint64_t short_dropped = 0;  // runs shorter than the minimum length
  std::uint64_t ambiguous_bases = 0;
};

/// Reads FASTA or FASTQ files (plain or gzip, detected per file) in order.
/// With split_on_n, each record is split at non-ACGT characters and runs
/// shorter than `min_length` are dropped and counted; otherwise a non-ACGT
/// character is an error. Malformed input throws IoError with file:line.
class FastxReadStream : public ReadStream {
 public:
  FastxReadStream(std::vector<std::filesystem::path> paths, std::size_t min_length, bool split_on_n = true);
  ~FastxReadStream() override;

  bool next(PackedSequence& read) override;
  void rewind() override;
  const IngestStats& stats() const noexcept { return stats_; }

 private:
  bool open_next_file();
  bool read_line(std::string& line);
  bool next_record(std::string& sequence);
  [[noreturn]] void fail(const std::string& message) const;

  std::vector<std::filesystem::path> paths_;
  std::size_t min_length_;
  bool split_on_n_;
  std::size_t file_index_ = 0;
  void* gz_ = nullptr;
  std::uint64_t line_no_ = 0;
  std::string pending_line_;
  bool has_pending_ = false;
  char format_ = 0;  // '>' or '@'
  std::deque<PackedSequence> queue_;
  IngestStats stats_;
};

/// Fixed-format writers used by tests and the example corpus generator.
void write_fasta(const std::filesystem::path& path, const std::vector<std::string>& reads);
void write_fastq(const std::filesystem::path& path, const std::vector<std::string>& reads);

}  // namespace msp
