#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace msp {

/// Tournament (loser) tree merging k sorted sources. A source is a callable
/// `bool(T&)` that yields its next element or returns false when exhausted.
/// Equal heads are released in source-index order, so the merge is stable.
template <class T, class Less = std::less<T>>
class LoserTree {
 public:
  using Source = std::function<bool(T&)>;

  explicit LoserTree(std::vector<Source> sources, Less less = {})
      : sources_(std::move(sources)), less_(std::move(less)), heads_(sources_.size()), alive_(sources_.size()) {
    const std::size_t k = sources_.size();
    for (std::size_t i = 0; i < k; ++i) alive_[i] = sources_[i](heads_[i]);
    tree_.assign(k == 0 ? 1 : k, 0);
    if (k > 1) {
      tree_[0] = build(1);
    }
  }

  bool empty() const noexcept { return sources_.empty() || !alive_[tree_[0]]; }
  const T& top() const noexcept { return heads_[tree_[0]]; }
  std::size_t top_source() const noexcept { return tree_[0]; }

  void pop() {
    const std::size_t s = tree_[0];
    alive_[s] = sources_[s](heads_[s]);
    replay(s);
  }

  std::uint64_t comparisons() const noexcept { return comparisons_; }

 private:
  bool better(std::size_t a, std::size_t b) {
    if (!alive_[a]) return false;
    if (!alive_[b]) return true;
    ++comparisons_;
    if (less_(heads_[a], heads_[b])) return true;
    if (less_(heads_[b], heads_[a])) return false;
    return a < b;
  }

  std::size_t build(std::size_t node) {
    const std::size_t k = sources_.size();
    if (node >= k) return node - k;
    std::size_t left = build(2 * node);
    std::size_t right = build(2 * node + 1);
    if (better(left, right)) {
      tree_[node] = right;
      return left;
    }
    tree_[node] = left;
    return right;
  }

  void replay(std::size_t leaf) {
    const std::size_t k = sources_.size();
    if (k <= 1) return;
    std::size_t winner = leaf;
    for (std::size_t node = (leaf + k) / 2; node >= 1; node /= 2) {
      if (better(tree_[node], winner)) std::swap(tree_[node], winner);
    }
    tree_[0] = winner;
  }

  std::vector<Source> sources_;
  Less less_;
  std::vector<T> heads_;
  std::vector<char> alive_;
  std::vector<std::size_t> tree_;
  std::uint64_t comparisons_ = 0;
};

}  // namespace msp
