#include <algorithm>
#include <thread>

#include "msp/partitioning.hpp"

namespace msp {

namespace {

struct ScannedRead {
  std::vector<Segment> segments;
  ScanStats stats;
};

class ScatterState {
 public:
  ScatterState(const PartitionConfig& cfg, PartitionResult& result) : cfg_(cfg), result_(result) {
    const auto dir = cfg.work_dir / "partitions";
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
    raise_open_file_limit(static_cast<std::size_t>(cfg.t) + 64);
    const std::size_t buffer =
        std::clamp<std::uint64_t>(cfg.memory_budget / (8 * static_cast<std::uint64_t>(cfg.t)), 4096, 1 << 16);
    writers_.reserve(cfg.t);
    for (std::uint32_t i = 0; i < cfg.t; ++i) {
      const auto path = partition_path(cfg.work_dir, i);
      if (i % 256 == 0) ensure_writable_directory(path.parent_path());
      writers_.emplace_back(path, i, buffer);
    }
    lengths_ = BinaryWriter(read_lengths_path(cfg.work_dir), "read lengths");
  }

  void emit(const PackedSequence& read, const ScannedRead& scanned) {
    const unsigned k = cfg_.k;
    for (const auto& seg : scanned.segments) {
      const std::uint32_t idx = partition_of(seg.minimizer, cfg_.t, cfg_.wrap);
      writers_[idx].append(next_ordinal_ + seg.first_window, read, seg.first_window, seg.windows + k - 1);
    }
    const std::uint64_t kmers = read.size() - k + 1;
    next_ordinal_ += kmers;
    lengths_.put_u32(static_cast<std::uint32_t>(read.size()));
    ++result_.reads;
    result_.input_bases += read.size();
    result_.total_kmers += kmers;
    result_.breaks += scanned.stats.breaks;
    result_.comparisons += scanned.stats.comparisons;
  }

  void finish() {
    lengths_.close();
    result_.partitions.resize(writers_.size());
    for (std::size_t i = 0; i < writers_.size(); ++i) {
      writers_[i].close();
      auto& s = result_.partitions[i];
      s.records = writers_[i].records();
      s.bases = writers_[i].bases();
      s.bytes = writers_[i].bytes();
      s.kmers = s.bases - s.records * (cfg_.k - 1);
    }
  }

 private:
  const PartitionConfig& cfg_;
  PartitionResult& result_;
  std::vector<PartitionWriter> writers_;
  BinaryWriter lengths_;
  std::uint64_t next_ordinal_ = 1;
};

}  // namespace

PartitionResult msp_partition(ReadStream& reads, const PartitionConfig& cfg) {
  cfg.validate();
  ensure_writable_directory(cfg.work_dir);
  PartitionResult result;
  ScatterState state(cfg, result);
  PackedSequence read;

  if (cfg.threads == 1) {
    SegmentScanner scanner(cfg.k, cfg.p, cfg.rc_mode, cfg.scanner);
    ScannedRead scanned;
    while (reads.next(read)) {
      if (read.size() < cfg.k) {
        ++result.skipped_reads;
        continue;
      }
      scanned.stats = scanner.scan(read, scanned.segments);
      state.emit(read, scanned);
    }
    state.finish();
    return result;
  }

  // Workers scan a batch in parallel; the batch is then scattered in read
  // order, so file contents do not depend on the thread count.
  const std::size_t batch_size = 4096 * cfg.threads;
  std::vector<PackedSequence> batch;
  std::vector<ScannedRead> scanned(batch_size);
  std::vector<SegmentScanner> scanners;
  for (unsigned i = 0; i < cfg.threads; ++i) scanners.emplace_back(cfg.k, cfg.p, cfg.rc_mode, cfg.scanner);
  bool more = true;
  while (more) {
    batch.clear();
    while (batch.size() < batch_size && (more = reads.next(read))) {
      if (read.size() < cfg.k) {
        ++result.skipped_reads;
        continue;
      }
      batch.push_back(read);
    }
    {
      std::vector<std::jthread> workers;
      for (unsigned w = 0; w < cfg.threads; ++w) {
        workers.emplace_back([&, w] {
          for (std::size_t i = w; i < batch.size(); i += cfg.threads) {
            scanned[i].stats = scanners[w].scan(batch[i], scanned[i].segments);
          }
        });
      }
    }
    for (std::size_t i = 0; i < batch.size(); ++i) state.emit(batch[i], scanned[i]);
  }
  state.finish();
  return result;
}

}  // namespace msp
