#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "msp/sequence.hpp"

namespace msp {

enum class Strand : std::uint8_t { forward, reverse };

/// Minimum p-substring of a window and where it starts.
struct MinimizerResult {
  PackedSequence substring;
  std::size_t position = 0;  // 0-based, on the strand named by `strand`
  Strand strand = Strand::forward;
};

/// Leftmost lexicographically smallest p-substring of `window`.
/// Throws std::invalid_argument when p is 0, exceeds 32, or exceeds |window|.
MinimizerResult min_p_bruteforce(const PackedSequence& window, unsigned p);

/// Minimum over the p-substrings of `window` and of its reverse complement.
/// The forward strand wins ties.
MinimizerResult min_p_rc(const PackedSequence& window, unsigned p);

enum class Scanner : std::uint8_t { simple, queue, brute };

std::string_view to_string(Scanner s) noexcept;
/// Accepts "scan"/"simple", "queue" and "brute".
Scanner parse_scanner(std::string_view name);

struct ScanOptions {
  bool reverse_complement = false;
  std::uint64_t first_ordinal = 1;  // ordinal assigned to the read's first k-mer
};

/// Maximal run of consecutive k-mers sharing one minimizer.
struct SuperKmer {
  std::uint64_t start_ordinal = 0;
  PackedSequence sequence;
  PackedSequence minimizer;

  std::size_t kmer_count(unsigned k) const noexcept { return sequence.size() - k + 1; }
  friend bool operator==(const SuperKmer&, const SuperKmer&) = default;
};

struct ScanStats {
  std::uint64_t comparisons = 0;  // p-substring comparisons
  std::uint64_t breaks = 0;       // minimizer changes along the read
};

struct ScanResult {
  std::vector<SuperKmer> super_kmers;
  ScanStats stats;
};

/// Window-sliding scan that rescans only when the current minimum leaves the
/// window. Uses at most m + lk - pl - p + 1 comparisons for l breaks.
ScanResult simple_scan(const PackedSequence& read, unsigned k, unsigned p, ScanOptions opts = {});
/// Same output as simple_scan, tracking the window minimum with a binary heap.
ScanResult queue_scan(const PackedSequence& read, unsigned k, unsigned p, ScanOptions opts = {});
/// Same output again, recomputing every window's minimum from scratch.
ScanResult brute_scan(const PackedSequence& read, unsigned k, unsigned p, ScanOptions opts = {});
ScanResult scan_read(Scanner scanner, const PackedSequence& read, unsigned k, unsigned p, ScanOptions opts = {});

/// Super k-mer expressed as a window range of its read.
struct Segment {
  std::uint32_t first_window = 0;
  std::uint32_t windows = 0;
  std::uint64_t minimizer = 0;  // packed p-substring value

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Allocation-free scanning core shared by the scanners above. Keeps its
/// buffers between calls, so one instance per worker thread.
class SegmentScanner {
 public:
  SegmentScanner(unsigned k, unsigned p, bool reverse_complement, Scanner scanner);

  /// Replaces `out` with the read's segments. Requires |read| >= k.
  ScanStats scan(const PackedSequence& read, std::vector<Segment>& out);

  unsigned k() const noexcept { return k_; }
  unsigned p() const noexcept { return p_; }

 private:
  void fill_values(const PackedSequence& read);
  ScanStats scan_simple(std::size_t windows, std::vector<Segment>& out);
  ScanStats scan_queue(std::size_t windows, std::vector<Segment>& out);
  ScanStats scan_brute(std::size_t windows, std::vector<Segment>& out);

  unsigned k_;
  unsigned p_;
  bool rc_;
  Scanner scanner_;
  std::vector<std::uint64_t> values_;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> heap_;
};

/// Checks 1 <= p <= min(k, 32); throws std::invalid_argument otherwise.
void validate_kp(unsigned k, unsigned p);

}  // namespace msp
