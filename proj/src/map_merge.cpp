#include "msp/map_merge.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <iterator>
#include <cstdio>
#include <memory>
#include <unordered_map>

#include "msp/external_sort.hpp"
#include "msp/kmer.hpp"
#include "msp/kmer_table.hpp"
#include "msp/loser_tree.hpp"

namespace msp {

bool RangeCoalescer::add(std::uint64_t from, std::uint64_t to, ReplacementRange& finished) {
  if (pending_.count != 0 && pending_.count != UINT32_MAX && from == pending_.from_start + pending_.count &&
      to == pending_.to_start + pending_.count) {
    ++pending_.count;
    return false;
  }
  const bool had = pending_.count != 0;
  finished = pending_;
  pending_ = {from, to, 1};
  return had;
}

bool RangeCoalescer::finish(ReplacementRange& finished) {
  if (pending_.count == 0) return false;
  finished = pending_;
  pending_ = {};
  return true;
}

ReplacementWriter::ReplacementWriter(const std::filesystem::path& path) : out_(path, "replacement file") {}

void ReplacementWriter::put(const ReplacementRange& r) {
  std::uint8_t buf[20];
  store_le64(buf, r.from_start);
  store_le64(buf + 8, r.to_start);
  store_le32(buf + 16, r.count);
  out_.write(buf, sizeof buf);
  ++ranges_;
  replaced_ += r.count;
}

void ReplacementWriter::add(std::uint64_t from, std::uint64_t to) {
  ReplacementRange done;
  if (coalescer_.add(from, to, done)) put(done);
}

void ReplacementWriter::close() {
  ReplacementRange done;
  if (coalescer_.finish(done)) put(done);
  out_.close();
}

bool ReplacementReader::next(ReplacementRange& range) {
  std::uint8_t buf[20];
  if (!in_.read(buf, sizeof buf)) return false;
  range.from_start = load_le64(buf);
  range.to_start = load_le64(buf + 8);
  range.count = load_le32(buf + 16);
  return true;
}

std::vector<ReplacementRange> read_replacement_file(const std::filesystem::path& path) {
  ReplacementReader reader(path);
  std::vector<ReplacementRange> out;
  ReplacementRange r;
  while (reader.next(r)) out.push_back(r);
  return out;
}

void write_replacement_file(const std::filesystem::path& path, std::span<const ReplacementRange> ranges) {
  BinaryWriter out(path, "replacement file");
  std::uint8_t buf[20];
  for (const auto& r : ranges) {
    store_le64(buf, r.from_start);
    store_le64(buf + 8, r.to_start);
    store_le32(buf + 16, r.count);
    out.write(buf, sizeof buf);
  }
  out.close();
}

std::filesystem::path replacement_path(const std::filesystem::path& work_dir, std::uint32_t index) {
  char shard[16];
  char name[32];
  std::snprintf(shard, sizeof shard, "%03u", index / 256);
  std::snprintf(name, sizeof name, "repl-%05u.bin", index);
  return work_dir / "replacements" / shard / name;
}

namespace {

template <std::size_t W, class Next, class Emit>
MapResult map_core(Next&& next, unsigned k, bool rc_mode, std::uint64_t budget, std::uint64_t expected,
                   const std::string& what, Emit&& emit) {
  auto over_budget = [&](const KmerTable<W>& table) {
    return std::runtime_error(what + " needs a " + std::to_string(table.memory_bytes()) +
                              "-byte k-mer table, over the memory budget of " + std::to_string(budget) +
                              " bytes; increase p or t");
  };
  KmerTable<W> table(expected);
  if (table.memory_bytes() > budget) throw over_budget(table);
  MapResult result;
  KmerRoller<W> roller(k);
  PartitionRecord rec;
  while (next(rec)) {
    roller.reset();
    std::uint64_t ordinal = rec.start_ordinal;
    const auto& seq = rec.sequence;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (!roller.push(seq[i])) continue;
      const std::size_t capacity = table.capacity();
      const auto [first, inserted] = table.try_emplace(roller.key(rc_mode), ordinal);
      if (!inserted) {
        emit(ordinal, first);
        ++result.replaced;
      } else if (table.capacity() != capacity && table.memory_bytes() > budget) {
        throw over_budget(table);
      }
      ++ordinal;
      ++result.kmers;
    }
  }
  result.distinct_kmers = table.size();
  result.table_bytes = table.memory_bytes();
  return result;
}

}  // namespace

MapResult map_partition(const std::filesystem::path& partition_file, const std::filesystem::path& replacement_file,
                        unsigned k, bool rc_mode, std::uint64_t memory_budget, std::uint64_t expected_kmers) {
  PartitionReader reader(partition_file);
  ReplacementWriter writer(replacement_file);
  MapResult result = with_kmer_width(k, [&](auto w) {
    return map_core<decltype(w)::value>([&](PartitionRecord& r) { return reader.next(r); }, k, rc_mode, memory_budget,
                                        expected_kmers, "partition " + partition_file.filename().string(),
                                        [&](std::uint64_t from, std::uint64_t to) { writer.add(from, to); });
  });
  writer.close();
  result.ranges = writer.ranges();
  return result;
}

std::vector<ReplacementRange> map_records(std::span<const PartitionRecord> records, unsigned k, bool rc_mode,
                                          MapResult* stats) {
  std::vector<ReplacementRange> out;
  RangeCoalescer coalescer;
  ReplacementRange done;
  std::size_t next_index = 0;
  MapResult result = with_kmer_width(k, [&](auto w) {
    return map_core<decltype(w)::value>(
        [&](PartitionRecord& r) {
          if (next_index == records.size()) return false;
          r = records[next_index++];
          return true;
        },
        k, rc_mode, ~std::uint64_t{0}, 0, "partition",
        [&](std::uint64_t from, std::uint64_t to) {
          if (coalescer.add(from, to, done)) out.push_back(done);
        });
  });
  if (coalescer.finish(done)) out.push_back(done);
  result.ranges = out.size();
  if (stats) *stats = result;
  return out;
}

namespace {

using RangeSource = LoserTree<ReplacementRange>::Source;

struct ByFrom {
  bool operator()(const ReplacementRange& a, const ReplacementRange& b) const { return a.from_start < b.from_start; }
};

// Walks ordinals 1..N, taking ids from the range with the smallest
// from_start and keeping each uncovered ordinal as its own id.
template <class Emit>
MergeResult merge_core(std::vector<RangeSource> sources, std::uint64_t total, Emit&& emit) {
  LoserTree<ReplacementRange, ByFrom> tree(std::move(sources));
  MergeResult result{total, 0};
  std::uint64_t next = 1;
  while (!tree.empty()) {
    const ReplacementRange r = tree.top();
    tree.pop();
    if (r.count == 0) throw std::runtime_error("replacement range with zero count at ordinal " + std::to_string(r.from_start));
    if (r.from_start < next) {
      throw std::runtime_error("overlapping replacement ranges at ordinal " + std::to_string(r.from_start) +
                               " (partition locality violated)");
    }
    if (r.to_start >= r.from_start) {
      throw std::runtime_error("replacement at ordinal " + std::to_string(r.from_start) + " does not point backwards");
    }
    if (r.from_start - 1 + r.count > total) {
      throw std::runtime_error("replacement range beyond the last ordinal " + std::to_string(total));
    }
    for (; next < r.from_start; ++next) emit(next);
    for (std::uint32_t i = 0; i < r.count; ++i) emit(r.to_start + i);
    next = r.from_start + r.count;
  }
  for (; next <= total; ++next) emit(next);
  return result;
}

}  // namespace

MergeResult merge_replacements(std::span<const std::filesystem::path> files, std::uint64_t total_kmers,
                               const std::filesystem::path& id_stream_out) {
  raise_open_file_limit(files.size() + 64);
  std::vector<RangeSource> sources;
  for (const auto& f : files) {
    auto reader = std::make_shared<ReplacementReader>(f);
    sources.emplace_back([reader](ReplacementRange& r) { return reader->next(r); });
  }
  BinaryWriter out(id_stream_out, "id stream");
  std::uint64_t replaced = 0;
  std::uint64_t ordinal = 0;
  MergeResult result = merge_core(std::move(sources), total_kmers, [&](std::uint64_t id) {
    out.put_u64(id);
    if (id != ++ordinal) ++replaced;
  });
  out.close();
  result.vertices = total_kmers - replaced;
  return result;
}

std::vector<std::uint64_t> merge_ranges(std::span<const std::vector<ReplacementRange>> files, std::uint64_t total_kmers) {
  std::vector<RangeSource> sources;
  for (const auto& f : files) {
    auto index = std::make_shared<std::size_t>(0);
    sources.emplace_back([&f, index](ReplacementRange& r) {
      if (*index == f.size()) return false;
      r = f[(*index)++];
      return true;
    });
  }
  std::vector<std::uint64_t> ids;
  ids.reserve(total_kmers);
  merge_core(std::move(sources), total_kmers, [&](std::uint64_t id) { ids.push_back(id); });
  return ids;
}

std::vector<std::uint64_t> read_id_stream(const std::filesystem::path& path) {
  BinaryReader in(path);
  std::vector<std::uint64_t> ids;
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (!ec) ids.reserve(size / 8);
  std::uint64_t v = 0;
  while (in.get_u64(v)) ids.push_back(v);
  return ids;
}

void write_id_stream(const std::filesystem::path& path, std::span<const std::uint64_t> ids) {
  BinaryWriter out(path, "id stream");
  for (auto id : ids) out.put_u64(id);
  out.close();
}

std::vector<std::uint32_t> read_read_lengths(const std::filesystem::path& path) {
  BinaryReader in(path);
  std::vector<std::uint32_t> lengths;
  std::uint32_t v = 0;
  while (in.get_u32(v)) lengths.push_back(v);
  return lengths;
}

IdStream load_id_stream(const std::filesystem::path& ids, const std::filesystem::path& read_lengths) {
  return {read_id_stream(ids), read_read_lengths(read_lengths)};
}

namespace {

struct IdPair {
  std::uint64_t u;
  std::uint64_t v;
  friend auto operator<=>(const IdPair&, const IdPair&) = default;
};

std::vector<Edge> aggregate(std::vector<IdPair>& pairs) {
  std::sort(pairs.begin(), pairs.end());
  std::vector<Edge> edges;
  for (const auto& p : pairs) {
    if (!edges.empty() && edges.back().u == p.u && edges.back().v == p.v) {
      ++edges.back().weight;
    } else {
      edges.push_back({p.u, p.v, 1});
    }
  }
  return edges;
}

std::vector<std::uint64_t> sorted_unique(std::vector<std::uint64_t> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

void append_decimal(std::string& out, std::uint64_t v) {
  char digits[20];
  int n = 0;
  do {
    digits[n++] = static_cast<char>('0' + v % 10);
    v /= 10;
  } while (v != 0);
  while (n > 0) out.push_back(digits[--n]);
}

std::uint64_t expected_kmers(std::span<const std::uint32_t> lengths, unsigned k) {
  std::uint64_t n = 0;
  for (auto m : lengths) {
    if (m < k) throw std::runtime_error("read length sidecar lists a read shorter than k");
    n += m - k + 1;
  }
  return n;
}

}  // namespace

DeBruijnGraph emit_edges(const IdStream& stream, unsigned k) {
  const std::uint64_t n = expected_kmers(stream.read_lengths, k);
  if (n != stream.ids.size()) {
    throw std::runtime_error("id stream holds " + std::to_string(stream.ids.size()) + " ids but the reads have " +
                             std::to_string(n) + " k-mers");
  }
  std::vector<IdPair> pairs;
  pairs.reserve(n);
  std::size_t o = 0;
  for (auto m : stream.read_lengths) {
    const std::size_t kmers = m - k + 1;
    for (std::size_t j = 1; j < kmers; ++j) pairs.push_back({stream.ids[o + j - 1], stream.ids[o + j]});
    o += kmers;
  }
  DeBruijnGraph g;
  g.vertices = sorted_unique(stream.ids);
  g.edges = aggregate(pairs);
  return g;
}

EdgeFileResult write_edge_list(const std::filesystem::path& id_stream, const std::filesystem::path& read_lengths,
                               unsigned k, const std::filesystem::path& out, const std::filesystem::path& temp_dir,
                               std::uint64_t memory_budget) {
  const auto lengths = read_read_lengths(read_lengths);
  const std::uint64_t n = expected_kmers(lengths, k);
  std::error_code ec;
  const auto size = std::filesystem::file_size(id_stream, ec);
  if (ec || size != n * 8) {
    throw std::runtime_error("id stream " + id_stream.string() + " does not hold " + std::to_string(n) + " ids");
  }
  const std::size_t max_records = std::max<std::uint64_t>(1024, memory_budget / (2 * sizeof(IdPair)));
  ExternalSorter<IdPair> pairs(temp_dir / "edge-runs", max_records);
  std::vector<bool> seen(n + 1, false);  // ids are ordinals or dense ranks, both in [1, N]
  BinaryReader in(id_stream);
  EdgeFileResult result;
  for (auto m : lengths) {
    std::uint64_t prev = 0;
    for (std::uint32_t j = 0; j + k <= m; ++j) {
      std::uint64_t id = 0;
      in.get_u64(id);
      if (id == 0 || id > n) throw std::runtime_error("id stream holds id " + std::to_string(id) + " outside [1, N]");
      if (!seen[id]) {
        seen[id] = true;
        ++result.vertices;
      }
      if (j > 0) {
        pairs.add({prev, id});
        ++result.adjacencies;
      }
      prev = id;
    }
  }
  result.spilled = pairs.run_count() > 0;
  BinaryWriter text(out, "edge list");
  std::string line;
  Edge cur;
  auto flush_edge = [&] {
    if (cur.weight == 0) return;
    line.clear();
    append_decimal(line, cur.u);
    line.push_back(' ');
    append_decimal(line, cur.v);
    line.push_back(' ');
    append_decimal(line, cur.weight);
    line.push_back('\n');
    text.write(line.data(), line.size());
    ++result.edges;
  };
  pairs.drain([&](const IdPair& pr) {
    if (cur.weight != 0 && cur.u == pr.u && cur.v == pr.v) {
      ++cur.weight;
      return;
    }
    flush_edge();
    cur = {pr.u, pr.v, 1};
  });
  flush_edge();
  text.close();
  std::filesystem::remove_all(temp_dir / "edge-runs", ec);
  return result;
}

std::vector<Edge> read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open edge list " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), {}};
  std::vector<Edge> edges;
  const char* p = text.data();
  const char* const end = text.data() + text.size();
  auto field = [&](std::uint64_t& out, char sep) {
    const auto r = std::from_chars(p, end, out);
    if (r.ec != std::errc{} || r.ptr == end || *r.ptr != sep) return false;
    p = r.ptr + 1;
    return true;
  };
  while (p != end) {
    Edge e;
    if (!field(e.u, ' ') || !field(e.v, ' ') || !field(e.weight, '\n')) {
      throw IoError(path.string() + ":" + std::to_string(edges.size() + 1) + ": malformed edge line");
    }
    edges.push_back(e);
  }
  return edges;
}

namespace {

// Builds every key from scratch out of the read and its reverse complement
// rather than with the rolling code the pipeline uses, then assigns ids by
// sorting (key, ordinal) pairs instead of hashing.
template <std::size_t W>
ReferenceResult reference_impl(ReadStream& reads, unsigned k, bool rc_mode) {
  ReferenceResult result;
  std::vector<std::pair<KmerKey<W>, std::uint64_t>> keyed;
  PackedSequence read;
  PackedSequence rc_read;
  while (reads.next(read)) {
    if (read.size() < k) continue;
    result.read_lengths.push_back(static_cast<std::uint32_t>(read.size()));
    if (rc_mode) rc_read = reverse_complement(read);
    for (std::size_t j = 0; j + k <= read.size(); ++j) {
      auto key = KmerKey<W>::from(read, j, k);
      if (rc_mode) key = std::min(key, KmerKey<W>::from(rc_read, read.size() - k - j, k));
      keyed.emplace_back(key, keyed.size() + 1);
    }
  }
  std::sort(keyed.begin(), keyed.end());
  result.ids.resize(keyed.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    const bool first = i == 0 || keyed[i].first != keyed[i - 1].first;
    result.ids[keyed[i].second - 1] = first ? keyed[i].second : result.ids[keyed[i - 1].second - 1];
  }
  std::vector<std::pair<KmerKey<W>, std::uint64_t>>().swap(keyed);

  std::vector<IdPair> pairs;
  pairs.reserve(result.ids.size());
  std::size_t o = 0;
  for (auto m : result.read_lengths) {
    const std::size_t n = m - k + 1;
    for (std::size_t j = 1; j < n; ++j) pairs.push_back({result.ids[o + j - 1], result.ids[o + j]});
    o += n;
  }
  result.graph.vertices = sorted_unique(result.ids);
  result.graph.edges = aggregate(pairs);
  return result;
}

}  // namespace

ReferenceResult reference_build(ReadStream& reads, unsigned k, bool rc_mode) {
  return with_kmer_width(k, [&](auto w) { return reference_impl<decltype(w)::value>(reads, k, rc_mode); });
}

std::vector<std::uint64_t> densify(std::span<const std::uint64_t> ids) {
  std::unordered_map<std::uint64_t, std::uint64_t> dense;
  std::vector<std::uint64_t> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(dense.try_emplace(id, dense.size() + 1).first->second);
  return out;
}

DeBruijnGraph densify(const DeBruijnGraph& graph) {
  auto rank = [&](std::uint64_t id) {
    return static_cast<std::uint64_t>(std::lower_bound(graph.vertices.begin(), graph.vertices.end(), id) -
                                      graph.vertices.begin()) + 1;
  };
  DeBruijnGraph out;
  out.vertices.resize(graph.vertices.size());
  for (std::size_t i = 0; i < out.vertices.size(); ++i) out.vertices[i] = i + 1;
  out.edges.reserve(graph.edges.size());
  for (const auto& e : graph.edges) out.edges.push_back({rank(e.u), rank(e.v), e.weight});
  return out;
}

std::vector<std::uint64_t> normalize_classes(std::span<const std::uint64_t> ids) {
  std::unordered_map<std::uint64_t, std::uint64_t> first;
  std::vector<std::uint64_t> out;
  out.reserve(ids.size());
  for (std::size_t o = 0; o < ids.size(); ++o) out.push_back(first.try_emplace(ids[o], o + 1).first->second);
  return out;
}

}  // namespace msp
