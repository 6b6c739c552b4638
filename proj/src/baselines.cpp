#include <algorithm>
#include <memory>

#include "msp/kmer.hpp"
#include "msp/kmer_table.hpp"
#include "msp/loser_tree.hpp"
#include "msp/partitioning.hpp"

namespace msp {

namespace {

void check_config(const BaselineConfig& cfg) {
  if (cfg.k == 0 || cfg.k > kMaxK) throw std::invalid_argument("k must be in [1, 128]");
  if (cfg.t == 0) throw std::invalid_argument("t must be at least 1");
  if (cfg.suffix_symbols > cfg.k || cfg.suffix_symbols > 32) {
    throw std::invalid_argument("suffix_symbols must not exceed k or 32");
  }
}

template <std::size_t W>
void check_budget(const KmerTable<W>& table, const BaselineConfig& cfg, const char* what) {
  if (table.memory_bytes() > cfg.memory_budget) {
    throw std::runtime_error(std::string(what) + " hash table needs " + std::to_string(table.memory_bytes()) +
                             " bytes, over the memory budget; increase t");
  }
}

// on_read(read) runs before each participating read (false stops the walk),
// on_kmer(key) for each of its k-mers, in ordinal order.
template <std::size_t W, class OnRead, class OnKmer>
void for_each_kmer(ReadStream& reads, unsigned k, bool rc, OnRead on_read, OnKmer on_kmer) {
  PackedSequence read;
  KmerRoller<W> roller(k);
  while (reads.next(read)) {
    if (read.size() < k) continue;
    if (!on_read(read)) return;
    roller.reset();
    for (std::size_t i = 0; i < read.size(); ++i) {
      if (roller.push(read[i])) on_kmer(roller.key(rc));
    }
  }
}

template <std::size_t W>
struct KeyId {
  KmerKey<W> key;
  std::uint64_t id;
};

template <std::size_t W>
BaselineResult h_impl(ReadStream& reads, const BaselineConfig& cfg) {
  BaselineResult result;
  const auto dir = cfg.work_dir / "baseline-h";
  std::error_code ec;
  std::filesystem::remove_all(dir, ec);
  ensure_writable_directory(dir);

  // Chunk boundaries need the participating read count up front.
  std::uint64_t total_reads = 0;
  for_each_kmer<W>(reads, cfg.k, cfg.rc_mode, [&](const PackedSequence&) { return ++total_reads, true; },
                   [](const KmerKey<W>&) {});
  reads.rewind();
  const std::uint64_t chunk_reads = std::max<std::uint64_t>(1, (total_reads + cfg.t - 1) / cfg.t);
  const std::uint32_t chunks = total_reads == 0 ? 0 : static_cast<std::uint32_t>((total_reads + chunk_reads - 1) / chunk_reads);

  auto sorted_path = [&](std::uint32_t i) { return dir / ("chunk-" + std::to_string(i) + ".sorted"); };
  auto local_path = [&](std::uint32_t i) { return dir / ("chunk-" + std::to_string(i) + ".local"); };
  auto remap_path = [&](std::uint32_t i) { return dir / ("chunk-" + std::to_string(i) + ".remap"); };

  // Step 1: per-chunk local ids, a local id per occurrence, and a spill file
  // of the chunk's distinct k-mers sorted by k-mer.
  std::vector<std::uint64_t> distinct(chunks, 0);
  KmerTable<W> table;
  BinaryWriter local;
  std::uint64_t in_chunk = 0;
  std::uint32_t chunk = 0;
  auto close_chunk = [&] {
    std::vector<KeyId<W>> entries;
    entries.reserve(table.size());
    table.for_each([&](const KmerKey<W>& key, std::uint64_t id) { entries.push_back({key, id}); });
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
    BinaryWriter out(sorted_path(chunk), "h-partition spill");
    out.write(entries.data(), entries.size() * sizeof(KeyId<W>));
    out.close();
    local.close();
    result.spill_bytes += out.bytes_written() + local.bytes_written();
    distinct[chunk] = table.size();
    result.peak_table_entries = std::max<std::uint64_t>(result.peak_table_entries, table.size());
    table.clear();
    ++chunk;
  };
  for_each_kmer<W>(
      reads, cfg.k, cfg.rc_mode,
      [&](const PackedSequence&) {
        if (in_chunk == chunk_reads) {
          close_chunk();
          in_chunk = 0;
        }
        if (in_chunk == 0) local = BinaryWriter(local_path(chunk), "h-partition local ids");
        ++in_chunk;
        ++result.reads;
        return true;
      },
      [&](const KmerKey<W>& key) {
        const auto [id, inserted] = table.try_emplace(key, table.size() + 1);
        if (inserted) check_budget(table, cfg, "chunk");
        local.put_u64(id);
        ++result.total_kmers;
      });
  if (in_chunk > 0) close_chunk();

  std::vector<std::uint64_t> offset(chunks + 1, 0);
  for (std::uint32_t i = 0; i < chunks; ++i) offset[i + 1] = offset[i] + distinct[i];

  // Step 2: merge the sorted spills. Equal k-mers leave the tree in chunk
  // order, so the first one seen comes from the smallest chunk holding it.
  {
    std::vector<std::shared_ptr<BinaryReader>> readers;
    std::vector<typename LoserTree<KeyId<W>>::Source> sources;
    std::vector<BinaryWriter> remap;
    for (std::uint32_t i = 0; i < chunks; ++i) {
      auto r = std::make_shared<BinaryReader>(sorted_path(i));
      readers.push_back(r);
      sources.emplace_back([r](KeyId<W>& out) { return r->read(&out, sizeof out); });
      remap.emplace_back(remap_path(i), "h-partition remap");
    }
    auto less = [](const KeyId<W>& a, const KeyId<W>& b) { return a.key < b.key; };
    LoserTree<KeyId<W>, decltype(less)> tree(std::move(sources), less);
    KmerKey<W> current{};
    std::uint64_t global = 0;
    bool have = false;
    while (!tree.empty()) {
      const KeyId<W> head = tree.top();
      const std::size_t src = tree.top_source();
      tree.pop();
      if (!have || head.key != current) {
        current = head.key;
        global = offset[src] + head.id;
        have = true;
        ++result.distinct_kmers;
      }
      remap[src].put_u64(head.id);
      remap[src].put_u64(global);
    }
    for (auto& w : remap) w.close();
  }

  // Step 3: translate each chunk's local ids, chunk by chunk in ordinal order.
  result.id_stream = cfg.work_dir / "baseline-h.ids";
  BinaryWriter ids(result.id_stream, "h-partition id stream");
  for (std::uint32_t i = 0; i < chunks; ++i) {
    std::vector<std::uint64_t> to_global(distinct[i] + 1, 0);
    BinaryReader remap(remap_path(i));
    std::uint64_t from = 0;
    std::uint64_t to = 0;
    while (remap.get_u64(from) && remap.get_u64(to)) to_global[from] = to;
    BinaryReader occurrences(local_path(i));
    while (occurrences.get_u64(from)) ids.put_u64(to_global[from]);
  }
  ids.close();
  std::filesystem::remove_all(dir, ec);
  return result;
}

template <std::size_t W>
std::uint32_t bucket_of(const KmerKey<W>& key, const BaselineConfig& cfg) {
  if (cfg.suffix_symbols == 0) return static_cast<std::uint32_t>(key.hash() % cfg.t);
  const unsigned bits = 2 * cfg.suffix_symbols;
  const std::uint64_t low = key.words[W - 1];
  const std::uint64_t suffix = bits == 64 ? low : low & ((std::uint64_t{1} << bits) - 1);
  return static_cast<std::uint32_t>(suffix % cfg.t);
}

struct OrdinalId {
  std::uint64_t ordinal;
  std::uint64_t id;
};

template <std::size_t W>
BaselineResult b_impl(ReadStream& reads, const BaselineConfig& cfg) {
  BaselineResult result;
  const auto dir = cfg.work_dir / "baseline-b";
  std::error_code ec;
  std::filesystem::remove_all(dir, ec);
  ensure_writable_directory(dir);
  auto bucket_path = [&](std::uint32_t j) { return dir / ("bucket-" + std::to_string(j) + ".kmers"); };
  auto ids_path = [&](std::uint32_t j) { return dir / ("bucket-" + std::to_string(j) + ".ids"); };

  // Scatter: one record per occurrence into bucket H(kmer) mod t, holding the
  // u64 LE ordinal and the k-mer's 2k-bit value in ceil(k/4) LE bytes.
  const std::size_t kmer_bytes = (cfg.k + 3) / 4;
  {
    const std::size_t buffer = std::clamp<std::uint64_t>(cfg.memory_budget / (8 * std::uint64_t{cfg.t}), 4096, 1 << 16);
    std::vector<BinaryWriter> buckets;
    buckets.reserve(cfg.t);
    for (std::uint32_t j = 0; j < cfg.t; ++j) buckets.emplace_back(bucket_path(j), "b-partition bucket " + std::to_string(j), buffer);
    std::vector<std::uint8_t> record(8 + kmer_bytes);
    std::uint64_t ordinal = 0;
    for_each_kmer<W>(
        reads, cfg.k, cfg.rc_mode, [&](const PackedSequence&) { return ++result.reads, true; },
        [&](const KmerKey<W>& key) {
          store_le64(record.data(), ++ordinal);
          for (std::size_t i = 0; i < kmer_bytes; ++i) record[8 + i] = static_cast<std::uint8_t>(key.words[W - 1 - i / 8] >> (8 * (i % 8)));
          buckets[bucket_of(key, cfg)].write(record.data(), record.size());
        });
    result.total_kmers = ordinal;
    for (auto& b : buckets) {
      b.close();
      result.spill_bytes += b.bytes_written();
    }
  }

  // Gather: each bucket numbers its distinct k-mers 1..|S_j| in ordinal order.
  std::vector<std::uint64_t> offset(cfg.t + 1, 0);
  {
    std::vector<std::uint8_t> record(8 + kmer_bytes);
    for (std::uint32_t j = 0; j < cfg.t; ++j) {
      KmerTable<W> table;
      BinaryReader in(bucket_path(j));
      BinaryWriter out(ids_path(j), "b-partition ids");
      while (in.read(record.data(), record.size())) {
        KmerKey<W> key{};
        for (std::size_t i = 0; i < kmer_bytes; ++i) key.words[W - 1 - i / 8] |= std::uint64_t{record[8 + i]} << (8 * (i % 8));
        const auto [id, inserted] = table.try_emplace(key, table.size() + 1);
        if (inserted) check_budget(table, cfg, "bucket");
        const OrdinalId rec{load_le64(record.data()), id};
        out.write(&rec, sizeof rec);
      }
      out.close();
      std::filesystem::remove(bucket_path(j), ec);
      result.peak_table_entries = std::max<std::uint64_t>(result.peak_table_entries, table.size());
      offset[j + 1] = offset[j] + table.size();
    }
    result.distinct_kmers = offset[cfg.t];
  }

  // Merge the per-bucket (ordinal, id) streams back into ordinal order.
  result.id_stream = cfg.work_dir / "baseline-b.ids";
  {
    std::vector<typename LoserTree<OrdinalId>::Source> sources;
    for (std::uint32_t j = 0; j < cfg.t; ++j) {
      auto r = std::make_shared<BinaryReader>(ids_path(j), 1 << 14);
      sources.emplace_back([r](OrdinalId& out) { return r->read(&out, sizeof out); });
    }
    auto less = [](const OrdinalId& a, const OrdinalId& b) { return a.ordinal < b.ordinal; };
    LoserTree<OrdinalId, decltype(less)> tree(std::move(sources), less);
    BinaryWriter ids(result.id_stream, "b-partition id stream");
    while (!tree.empty()) {
      ids.put_u64(offset[tree.top_source()] + tree.top().id);
      tree.pop();
    }
    ids.close();
  }
  std::filesystem::remove_all(dir, ec);
  return result;
}

}  // namespace

BaselineResult h_partition(ReadStream& reads, const BaselineConfig& cfg) {
  check_config(cfg);
  ensure_writable_directory(cfg.work_dir);
  raise_open_file_limit(2 * static_cast<std::size_t>(cfg.t) + 64);
  return with_kmer_width(cfg.k, [&](auto w) { return h_impl<decltype(w)::value>(reads, cfg); });
}

BaselineResult b_partition(ReadStream& reads, const BaselineConfig& cfg) {
  check_config(cfg);
  ensure_writable_directory(cfg.work_dir);
  raise_open_file_limit(static_cast<std::size_t>(cfg.t) + 64);
  return with_kmer_width(cfg.k, [&](auto w) { return b_impl<decltype(w)::value>(reads, cfg); });
}

}  // namespace msp
