#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "msp/map_merge.hpp"
#include "msp/partitioning.hpp"
#include "msp/read_stream.hpp"

namespace msp {

/// Line-oriented key=value text; keys are written in sorted order.
class Manifest {
 public:
  static Manifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void set(const std::string& key, std::uint64_t value) { values_[key] = std::to_string(value); }
  void set(const std::string& key, double value);
  void erase_prefix(const std::string& prefix);
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

enum class Phase : std::uint8_t { none, partition, map, merge, edges };
std::string_view to_string(Phase phase) noexcept;
Phase parse_phase(std::string_view name);

/// Fixed artifact locations inside a work directory.
struct WorkLayout {
  std::filesystem::path root;

  std::filesystem::path manifest() const { return root / "manifest.txt"; }
  std::filesystem::path ids() const { return root / "ids.bin"; }
  std::filesystem::path dense_ids() const { return root / "ids.dense.bin"; }
  std::filesystem::path read_lengths() const { return read_lengths_path(root); }
  std::filesystem::path edges() const { return root / "edges.txt"; }
  std::filesystem::path partition(std::uint32_t i) const { return partition_path(root, i); }
  std::filesystem::path replacement(std::uint32_t i) const { return replacement_path(root, i); }
};

struct BuildOptions {
  PartitionConfig partition;
  std::uint64_t seed = 0;  // echoed into the manifest for generated inputs
  bool dense = false;      // renumber vertex ids to 1..V before edge emission
};

/// Each phase reads the previous phase's artifacts and the manifest from
/// the work directory and records its results, wall time and peak RSS.
/// A phase may be re-run any number of times; its outputs are rewritten.
Manifest run_partition(ReadStream& reads, const BuildOptions& opts);
Manifest run_map(const std::filesystem::path& work_dir, std::uint64_t memory_budget, unsigned threads = 1);
Manifest run_merge(const std::filesystem::path& work_dir);
Manifest run_edges(const std::filesystem::path& work_dir, bool dense, std::uint64_t memory_budget);
/// partition, map, merge, edges.
Manifest build(ReadStream& reads, const BuildOptions& opts);

/// Reads the manifest and checks that `required` has completed.
Manifest load_manifest(const std::filesystem::path& work_dir, Phase required);

/// Loads the pipeline's graph (vertices from the id stream, edges from the
/// edge list) from a completed work directory.
DeBruijnGraph load_graph(const std::filesystem::path& work_dir);

enum class BaselineMode : std::uint8_t { h, b };

/// Runs H- or B-Partition and writes manifest-baseline-<mode>.txt with the
/// same key schema as the MSP manifest.
Manifest run_baseline(ReadStream& reads, BaselineMode mode, const BaselineConfig& cfg);

struct VerifyReport {
  bool ok = false;
  std::uint64_t vertices = 0;
  std::uint64_t edges = 0;
  std::uint64_t reference_vertices = 0;
  std::uint64_t reference_edges = 0;
  std::string detail;
};

/// Rebuilds the graph in memory with reference_build and compares it with
/// the work directory's graph (ids densified when the build was dense).
VerifyReport verify(ReadStream& reads, const std::filesystem::path& work_dir);

}  // namespace msp
