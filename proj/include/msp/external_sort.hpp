#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <type_traits>
#include <vector>

#include "msp/io.hpp"
#include "msp/loser_tree.hpp"

namespace msp {

/// Sorts a stream of fixed-size records with bounded memory: the in-memory
/// buffer is sorted and spilled as a run whenever it fills, and the runs are
/// k-way merged on output. Runs use host byte order and live only as long as
/// the sorter.
template <class T, class Less = std::less<T>>
class ExternalSorter {
  static_assert(std::is_trivially_copyable_v<T>);

 public:
  ExternalSorter(std::filesystem::path temp_dir, std::size_t max_records_in_memory, Less less = {})
      : dir_(std::move(temp_dir)), max_records_(std::max<std::size_t>(1, max_records_in_memory)), less_(less) {}

  ~ExternalSorter() {
    std::error_code ec;
    for (const auto& run : runs_) std::filesystem::remove(run, ec);
  }
  ExternalSorter(const ExternalSorter&) = delete;
  ExternalSorter& operator=(const ExternalSorter&) = delete;

  void add(const T& record) {
    buffer_.push_back(record);
    if (buffer_.size() >= max_records_) spill();
  }

  std::size_t run_count() const noexcept { return runs_.size(); }
  std::uint64_t spilled_bytes() const noexcept { return spilled_bytes_; }

  /// Calls `f(record)` in sorted order. Consumes the sorter.
  template <class F>
  void drain(F&& f) {
    if (runs_.empty()) {
      sort_buffer();
      for (const auto& r : buffer_) f(r);
      buffer_.clear();
      return;
    }
    if (!buffer_.empty()) spill();
    std::vector<std::shared_ptr<BinaryReader>> readers;
    std::vector<typename LoserTree<T, Less>::Source> sources;
    for (const auto& run : runs_) {
      auto reader = std::make_shared<BinaryReader>(run);
      readers.push_back(reader);
      sources.emplace_back([reader](T& out) { return reader->read(&out, sizeof(T)); });
    }
    LoserTree<T, Less> tree(std::move(sources), less_);
    while (!tree.empty()) {
      f(tree.top());
      tree.pop();
    }
  }

 private:
  // With the default ordering equal records are indistinguishable, so
  // stability only matters for custom comparators.
  void sort_buffer() {
    if constexpr (std::is_same_v<Less, std::less<T>>) {
      std::sort(buffer_.begin(), buffer_.end(), less_);
    } else {
      std::stable_sort(buffer_.begin(), buffer_.end(), less_);
    }
  }

  void spill() {
    sort_buffer();
    ensure_writable_directory(dir_);
    auto path = dir_ / ("run-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "-" +
                        std::to_string(runs_.size()) + ".tmp");
    BinaryWriter out(path, "sort run");
    out.write(buffer_.data(), buffer_.size() * sizeof(T));
    out.close();
    spilled_bytes_ += buffer_.size() * sizeof(T);
    runs_.push_back(std::move(path));
    buffer_.clear();
  }

  std::filesystem::path dir_;
  std::size_t max_records_;
  Less less_;
  std::vector<T> buffer_;
  std::vector<std::filesystem::path> runs_;
  std::uint64_t spilled_bytes_ = 0;
};

}  // namespace msp
