#include "msp/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "msp/io.hpp"

namespace msp {

Manifest Manifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  Manifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    m.values_[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

void Manifest::save(const std::filesystem::path& path) const {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    for (const auto& [k, v] : values_) out << k << '=' << v << '\n';
    if (!out.flush()) throw IoError("cannot write manifest " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

const std::string& Manifest::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::runtime_error("manifest has no key '" + key + "'");
  return it->second;
}

std::uint64_t Manifest::get_u64(const std::string& key) const {
  const auto& v = get(key);
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("manifest key '" + key + "' is not an integer: " + v);
  }
}

void Manifest::set(const std::string& key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  values_[key] = buf;
}

void Manifest::erase_prefix(const std::string& prefix) {
  auto it = values_.lower_bound(prefix);
  while (it != values_.end() && it->first.compare(0, prefix.size(), prefix) == 0) it = values_.erase(it);
}

std::string_view to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::none: return "none";
    case Phase::partition: return "partition";
    case Phase::map: return "map";
    case Phase::merge: return "merge";
    case Phase::edges: return "edges";
  }
  return "none";
}

Phase parse_phase(std::string_view name) {
  for (Phase p : {Phase::none, Phase::partition, Phase::map, Phase::merge, Phase::edges}) {
    if (to_string(p) == name) return p;
  }
  throw std::invalid_argument("unknown phase '" + std::string(name) + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

std::string partition_key(std::uint32_t i, const char* field) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "partition.%05u.%s", i, field);
  return buf;
}

void finish_phase(Manifest& m, Phase phase, Clock::time_point start, const WorkLayout& layout) {
  const std::string name(to_string(phase));
  m.set("phase." + name + ".seconds", std::chrono::duration<double>(Clock::now() - start).count());
  m.set("phase." + name + ".peak_rss_bytes", peak_rss_bytes());
  m.set("last_completed_phase", name);
  m.save(layout.manifest());
}

// Drops results of `phase` and everything after it.
void forget_from(Manifest& m, Phase phase) {
  static const std::vector<std::pair<Phase, std::vector<std::string>>> keys = {
      {Phase::map, {"map.", "phase.map."}},
      {Phase::merge, {"merge.", "phase.merge."}},
      {Phase::edges, {"edges.", "phase.edges."}},
  };
  for (const auto& [p, prefixes] : keys) {
    if (p < phase) continue;
    for (const auto& prefix : prefixes) m.erase_prefix(prefix);
  }
  if (phase <= Phase::map) {
    auto it = m.values().begin();
    std::vector<std::string> drop;
    for (; it != m.values().end(); ++it) {
      const auto& key = it->first;
      if (key.rfind("partition.", 0) == 0 && (key.ends_with(".distinct") || key.ends_with(".ranges"))) drop.push_back(key);
    }
    for (const auto& key : drop) m.erase_prefix(key);
  }
}

bool rc_mode_of(const Manifest& m) { return m.get("rc_mode") == "true"; }

}  // namespace

Manifest load_manifest(const std::filesystem::path& work_dir, Phase required) {
  WorkLayout layout{work_dir};
  if (!std::filesystem::exists(layout.manifest())) {
    throw std::runtime_error("no manifest in " + work_dir.string() + "; run the partition phase first");
  }
  Manifest m = Manifest::load(layout.manifest());
  const Phase done = m.has("last_completed_phase") ? parse_phase(m.get("last_completed_phase")) : Phase::none;
  if (done < required) {
    throw std::runtime_error("work directory " + work_dir.string() + " has completed phase '" +
                             std::string(to_string(done)) + "' but '" + std::string(to_string(required)) +
                             "' is required");
  }
  return m;
}

Manifest run_partition(ReadStream& reads, const BuildOptions& opts) {
  const auto& cfg = opts.partition;
  cfg.validate();
  const auto start = Clock::now();
  WorkLayout layout{cfg.work_dir};
  ensure_writable_directory(layout.root);
  std::error_code ec;
  std::filesystem::remove_all(layout.root / "replacements", ec);
  for (const auto& p : {layout.ids(), layout.dense_ids(), layout.edges()}) std::filesystem::remove(p, ec);

  const PartitionResult r = msp_partition(reads, cfg);
  Manifest m;
  m.set("k", std::uint64_t{cfg.k});
  m.set("p", std::uint64_t{cfg.p});
  m.set("t", std::uint64_t{cfg.t});
  m.set("rc_mode", cfg.rc_mode ? "true" : "false");
  m.set("scanner", std::string(to_string(cfg.scanner)));
  m.set("wrap", std::string(to_string(cfg.wrap)));
  m.set("seed", opts.seed);
  m.set("threads", std::uint64_t{cfg.threads});
  m.set("memory_budget", cfg.memory_budget);
  m.set("reads", r.reads);
  m.set("skipped_reads", r.skipped_reads);
  m.set("input_bases", r.input_bases);
  m.set("N", r.total_kmers);
  m.set("breaks", r.breaks);
  m.set("comparisons", r.comparisons);
  m.set("partition_bases", r.partition_bases());
  m.set("partition_bytes", r.partition_bytes());
  std::uint64_t records = 0;
  for (std::uint32_t i = 0; i < r.partitions.size(); ++i) {
    const auto& s = r.partitions[i];
    m.set(partition_key(i, "records"), s.records);
    m.set(partition_key(i, "bytes"), s.bytes);
    m.set(partition_key(i, "kmers"), s.kmers);
    records += s.records;
  }
  m.set("partition_records", records);
  finish_phase(m, Phase::partition, start, layout);
  return m;
}

Manifest run_map(const std::filesystem::path& work_dir, std::uint64_t memory_budget, unsigned threads) {
  const auto start = Clock::now();
  WorkLayout layout{work_dir};
  Manifest m = load_manifest(work_dir, Phase::partition);
  forget_from(m, Phase::map);
  const unsigned k = static_cast<unsigned>(m.get_u64("k"));
  const auto t = static_cast<std::uint32_t>(m.get_u64("t"));
  const bool rc = rc_mode_of(m);
  threads = std::max(1u, std::min<unsigned>(threads, t));
  const std::uint64_t per_worker = memory_budget / threads;

  std::error_code ec;
  std::filesystem::remove_all(layout.root / "replacements", ec);
  for (std::uint32_t i = 0; i < t; i += 256) ensure_writable_directory(layout.replacement(i).parent_path());

  std::vector<std::uint64_t> expected(t);
  for (std::uint32_t i = 0; i < t; ++i) expected[i] = m.get_u64(partition_key(i, "kmers"));
  std::vector<MapResult> results(t);
  std::atomic<std::uint32_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::uint32_t i = next++; i < t; i = next++) {
      try {
        results[i] = map_partition(layout.partition(i), layout.replacement(i), k, rc, per_worker, expected[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = t;
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  std::uint64_t distinct = 0, ranges = 0, replaced = 0, peak = 0, peak_bytes = 0, repl_bytes = 0;
  for (std::uint32_t i = 0; i < t; ++i) {
    const auto& r = results[i];
    m.set(partition_key(i, "distinct"), r.distinct_kmers);
    m.set(partition_key(i, "ranges"), r.ranges);
    distinct += r.distinct_kmers;
    ranges += r.ranges;
    replaced += r.replaced;
    peak = std::max(peak, r.distinct_kmers);
    peak_bytes = std::max(peak_bytes, r.table_bytes);
    repl_bytes += std::filesystem::file_size(layout.replacement(i));
  }
  m.set("V", distinct);
  m.set("map.replacement_ranges", ranges);
  m.set("map.replaced_kmers", replaced);
  m.set("map.replacement_bytes", repl_bytes);
  m.set("map.peak_table_entries", peak);
  m.set("map.peak_table_bytes", peak_bytes);
  m.set("map.memory_budget", memory_budget);
  m.set("map.threads", std::uint64_t{threads});
  finish_phase(m, Phase::map, start, layout);
  return m;
}

Manifest run_merge(const std::filesystem::path& work_dir) {
  const auto start = Clock::now();
  WorkLayout layout{work_dir};
  Manifest m = load_manifest(work_dir, Phase::map);
  forget_from(m, Phase::merge);
  const auto t = static_cast<std::uint32_t>(m.get_u64("t"));
  std::vector<std::filesystem::path> files;
  for (std::uint32_t i = 0; i < t; ++i) files.push_back(layout.replacement(i));
  const MergeResult r = merge_replacements(files, m.get_u64("N"), layout.ids());
  if (r.vertices != m.get_u64("V")) {
    throw std::runtime_error("merge produced " + std::to_string(r.vertices) + " vertices but mapping counted " +
                             m.get("V"));
  }
  m.set("merge.vertices", r.vertices);
  m.set("merge.id_stream_bytes", std::filesystem::file_size(layout.ids()));
  finish_phase(m, Phase::merge, start, layout);
  return m;
}

Manifest run_edges(const std::filesystem::path& work_dir, bool dense, std::uint64_t memory_budget) {
  const auto start = Clock::now();
  WorkLayout layout{work_dir};
  Manifest m = load_manifest(work_dir, Phase::merge);
  forget_from(m, Phase::edges);
  std::error_code ec;
  std::filesystem::remove(layout.dense_ids(), ec);
  auto ids = layout.ids();
  if (dense) {
    const auto raw = read_id_stream(layout.ids());
    write_id_stream(layout.dense_ids(), densify(raw));
    ids = layout.dense_ids();
  }
  const auto r = write_edge_list(ids, layout.read_lengths(), static_cast<unsigned>(m.get_u64("k")), layout.edges(),
                                 layout.root / "tmp", memory_budget);
  std::filesystem::remove_all(layout.root / "tmp", ec);
  m.set("edges.dense", dense ? "true" : "false");
  m.set("edges.vertices", r.vertices);
  m.set("edges.count", r.edges);
  m.set("edges.adjacencies", r.adjacencies);
  m.set("edges.spilled", r.spilled ? "true" : "false");
  finish_phase(m, Phase::edges, start, layout);
  return m;
}

Manifest build(ReadStream& reads, const BuildOptions& opts) {
  const auto& cfg = opts.partition;
  run_partition(reads, opts);
  run_map(cfg.work_dir, cfg.memory_budget, cfg.threads);
  run_merge(cfg.work_dir);
  return run_edges(cfg.work_dir, opts.dense, cfg.memory_budget);
}

DeBruijnGraph load_graph(const std::filesystem::path& work_dir) {
  WorkLayout layout{work_dir};
  const Manifest m = load_manifest(work_dir, Phase::edges);
  const bool dense = m.get("edges.dense") == "true";
  DeBruijnGraph g;
  g.vertices = read_id_stream(dense ? layout.dense_ids() : layout.ids());
  std::sort(g.vertices.begin(), g.vertices.end());
  g.vertices.erase(std::unique(g.vertices.begin(), g.vertices.end()), g.vertices.end());
  g.edges = read_edge_list(layout.edges());
  return g;
}

Manifest run_baseline(ReadStream& reads, BaselineMode mode, const BaselineConfig& cfg) {
  const auto start = Clock::now();
  const BaselineResult r = mode == BaselineMode::h ? h_partition(reads, cfg) : b_partition(reads, cfg);
  const std::string name = mode == BaselineMode::h ? "h" : "b";
  Manifest m;
  m.set("mode", name);
  m.set("k", std::uint64_t{cfg.k});
  m.set("t", std::uint64_t{cfg.t});
  m.set("rc_mode", cfg.rc_mode ? "true" : "false");
  m.set("memory_budget", cfg.memory_budget);
  m.set("suffix_symbols", std::uint64_t{cfg.suffix_symbols});
  m.set("reads", r.reads);
  m.set("N", r.total_kmers);
  m.set("V", r.distinct_kmers);
  m.set("spill_bytes", r.spill_bytes);
  m.set("peak_table_entries", r.peak_table_entries);
  m.set("id_stream", r.id_stream.filename().string());
  m.set("phase.baseline.seconds", std::chrono::duration<double>(Clock::now() - start).count());
  m.set("phase.baseline.peak_rss_bytes", peak_rss_bytes());
  m.save(cfg.work_dir / ("manifest-baseline-" + name + ".txt"));
  return m;
}

VerifyReport verify(ReadStream& reads, const std::filesystem::path& work_dir) {
  const Manifest m = load_manifest(work_dir, Phase::edges);
  VerifyReport report;
  DeBruijnGraph ref = reference_build(reads, static_cast<unsigned>(m.get_u64("k")), rc_mode_of(m)).graph;
  if (m.get("edges.dense") == "true") ref = densify(ref);
  const DeBruijnGraph g = load_graph(work_dir);
  report.vertices = g.vertices.size();
  report.edges = g.edges.size();
  report.reference_vertices = ref.vertices.size();
  report.reference_edges = ref.edges.size();
  report.ok = g == ref;
  if (report.ok) {
    report.detail = "graph matches the in-memory reference";
  } else if (g.vertices != ref.vertices) {
    report.detail = "vertex sets differ";
  } else {
    std::size_t i = 0;
    while (i < g.edges.size() && i < ref.edges.size() && g.edges[i] == ref.edges[i]) ++i;
    report.detail = "edge lists differ at entry " + std::to_string(i);
  }
  return report;
}

}  // namespace msp
