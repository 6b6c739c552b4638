#include "msp/minimizer.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "msp/kmer.hpp"

namespace msp {

void validate_kp(unsigned k, unsigned p) {
  if (p == 0 || p > kMaxP) throw std::invalid_argument("p must be in [1, 32], got " + std::to_string(p));
  if (p > k) throw std::invalid_argument("p must not exceed k (p=" + std::to_string(p) + ", k=" + std::to_string(k) + ")");
  if (k > kMaxK) throw std::invalid_argument("k must not exceed " + std::to_string(kMaxK));
}

MinimizerResult min_p_bruteforce(const PackedSequence& window, unsigned p) {
  if (p == 0 || p > kMaxP) throw std::invalid_argument("p must be in [1, 32]");
  if (p > window.size()) throw std::invalid_argument("p exceeds window length");
  std::size_t best_pos = 0;
  std::uint64_t best = window.value_at(0, p);
  for (std::size_t i = 1; i + p <= window.size(); ++i) {
    const std::uint64_t v = window.value_at(i, p);
    if (v < best) {
      best = v;
      best_pos = i;
    }
  }
  return {PackedSequence::from_value(best, p), best_pos, Strand::forward};
}

MinimizerResult min_p_rc(const PackedSequence& window, unsigned p) {
  MinimizerResult fwd = min_p_bruteforce(window, p);
  MinimizerResult rev = min_p_bruteforce(reverse_complement(window), p);
  if (compare(rev.substring, fwd.substring) < 0) {
    rev.strand = Strand::reverse;
    return rev;
  }
  return fwd;
}

std::string_view to_string(Scanner s) noexcept {
  switch (s) {
    case Scanner::simple: return "scan";
    case Scanner::queue: return "queue";
    case Scanner::brute: return "brute";
  }
  return "scan";
}

Scanner parse_scanner(std::string_view name) {
  if (name == "scan" || name == "simple") return Scanner::simple;
  if (name == "queue") return Scanner::queue;
  if (name == "brute") return Scanner::brute;
  throw std::invalid_argument("unknown scanner '" + std::string(name) + "' (expected scan, queue or brute)");
}

SegmentScanner::SegmentScanner(unsigned k, unsigned p, bool reverse_complement, Scanner scanner)
    : k_(k), p_(p), rc_(reverse_complement), scanner_(scanner) {
  validate_kp(k, p);
}

void SegmentScanner::fill_values(const PackedSequence& read) {
  const std::size_t m = read.size();
  const std::size_t count = m - p_ + 1;
  values_.resize(count);
  const std::uint64_t mask = p_ == 32 ? ~std::uint64_t{0} : (std::uint64_t{1} << (2 * p_)) - 1;
  const unsigned top = 2 * (p_ - 1);
  std::uint64_t fwd = 0;
  std::uint64_t rev = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const Code c = read[i];
    fwd = ((fwd << 2) | c) & mask;
    rev = (rev >> 2) | (static_cast<std::uint64_t>(complement(c)) << top);
    if (i + 1 >= p_) values_[i + 1 - p_] = rc_ ? std::min(fwd, rev) : fwd;
  }
}

ScanStats SegmentScanner::scan(const PackedSequence& read, std::vector<Segment>& out) {
  if (read.size() < k_) throw std::invalid_argument("read shorter than k");
  out.clear();
  fill_values(read);
  const std::size_t windows = read.size() - k_ + 1;
  ScanStats stats;
  switch (scanner_) {
    case Scanner::simple: stats = scan_simple(windows, out); break;
    case Scanner::queue: stats = scan_queue(windows, out); break;
    case Scanner::brute: stats = scan_brute(windows, out); break;
  }
  stats.breaks = out.size() - 1;
  return stats;
}

namespace {

void extend(std::vector<Segment>& out, std::size_t window, std::uint64_t minimizer) {
  if (!out.empty() && out.back().minimizer == minimizer) {
    ++out.back().windows;
  } else {
    out.push_back({static_cast<std::uint32_t>(window), 1, minimizer});
  }
}

}  // namespace

// The tracked position is the rightmost occurrence of the current minimum, so
// every p-substring after it in the window is strictly larger. When it leaves
// the window, the incoming p-substring is tested first; only if it is larger
// than the old minimum is a rescan needed, and then the minimum strictly
// increases. Each rescan therefore coincides with a break.
ScanStats SegmentScanner::scan_simple(std::size_t windows, std::vector<Segment>& out) {
  const std::size_t span = k_ - p_ + 1;
  const auto& v = values_;
  ScanStats stats;
  auto rescan = [&](std::size_t w) {
    std::size_t best = w;
    for (std::size_t j = w + 1; j < w + span; ++j) {
      ++stats.comparisons;
      if (v[j] <= v[best]) best = j;
    }
    return best;
  };

  std::size_t best = rescan(0);
  out.push_back({0, 1, v[best]});
  for (std::size_t w = 1; w < windows; ++w) {
    const std::size_t incoming = w + span - 1;
    const std::uint64_t current = v[best];
    ++stats.comparisons;
    if (v[incoming] <= current) {
      best = incoming;
    } else if (best < w) {
      best = rescan(w);
    }
    extend(out, w, v[best]);
  }
  return stats;
}

ScanStats SegmentScanner::scan_queue(std::size_t windows, std::vector<Segment>& out) {
  const std::size_t span = k_ - p_ + 1;
  ScanStats stats;
  // Min-heap on (value, position); ties resolve to the leftmost position.
  auto greater = [&stats](const auto& a, const auto& b) {
    ++stats.comparisons;
    return a > b;
  };
  heap_.clear();
  for (std::size_t j = 0; j < span; ++j) {
    heap_.emplace_back(values_[j], static_cast<std::uint32_t>(j));
    std::push_heap(heap_.begin(), heap_.end(), greater);
  }
  out.push_back({0, 1, heap_.front().first});
  for (std::size_t w = 1; w < windows; ++w) {
    const std::size_t incoming = w + span - 1;
    heap_.emplace_back(values_[incoming], static_cast<std::uint32_t>(incoming));
    std::push_heap(heap_.begin(), heap_.end(), greater);
    while (heap_.front().second < w) {
      std::pop_heap(heap_.begin(), heap_.end(), greater);
      heap_.pop_back();
    }
    extend(out, w, heap_.front().first);
  }
  return stats;
}

ScanStats SegmentScanner::scan_brute(std::size_t windows, std::vector<Segment>& out) {
  const std::size_t span = k_ - p_ + 1;
  ScanStats stats;
  for (std::size_t w = 0; w < windows; ++w) {
    std::uint64_t best = values_[w];
    for (std::size_t j = w + 1; j < w + span; ++j) {
      ++stats.comparisons;
      best = std::min(best, values_[j]);
    }
    extend(out, w, best);
  }
  return stats;
}

namespace {

ScanResult to_super_kmers(const PackedSequence& read, unsigned k, unsigned p, const ScanOptions& opts,
                          const std::vector<Segment>& segments, ScanStats stats) {
  ScanResult result;
  result.stats = stats;
  result.super_kmers.reserve(segments.size());
  for (const auto& s : segments) {
    result.super_kmers.push_back({opts.first_ordinal + s.first_window, read.subsequence(s.first_window, s.windows + k - 1),
                                  PackedSequence::from_value(s.minimizer, p)});
  }
  return result;
}

}  // namespace

ScanResult scan_read(Scanner scanner, const PackedSequence& read, unsigned k, unsigned p, ScanOptions opts) {
  SegmentScanner core(k, p, opts.reverse_complement, scanner);
  std::vector<Segment> segments;
  const ScanStats stats = core.scan(read, segments);
  return to_super_kmers(read, k, p, opts, segments, stats);
}

ScanResult simple_scan(const PackedSequence& read, unsigned k, unsigned p, ScanOptions opts) {
  return scan_read(Scanner::simple, read, k, p, opts);
}

ScanResult queue_scan(const PackedSequence& read, unsigned k, unsigned p, ScanOptions opts) {
  return scan_read(Scanner::queue, read, k, p, opts);
}

ScanResult brute_scan(const PackedSequence& read, unsigned k, unsigned p, ScanOptions opts) {
  return scan_read(Scanner::brute, read, k, p, opts);
}

}  // namespace msp
