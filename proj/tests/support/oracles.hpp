#pragma once

// Deliberately naive reference implementations over std::string. They share
// no code with the library beyond the public types used to hand data over.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <unistd.h>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline char complement(char c) {
  switch (c) {
    case 'A': return 'T';
    case 'C': return 'G';
    case 'G': return 'C';
    case 'T': return 'A';
  }
  return 'N';
}

inline std::string reverse_complement(const std::string& s) {
  std::string r;
  for (auto it = s.rbegin(); it != s.rend(); ++it) r.push_back(complement(*it));
  return r;
}

inline std::string canonical(const std::string& s) { return std::min(s, reverse_complement(s)); }

inline std::string random_dna(std::size_t n, std::mt19937_64& rng) {
  static const char bases[] = "ACGT";
  std::string s(n, 'A');
  for (auto& c : s) c = bases[rng() & 3u];
  return s;
}

/// Leftmost smallest p-substring and its position.
inline std::pair<std::string, std::size_t> min_p(const std::string& w, std::size_t p) {
  std::string best = w.substr(0, p);
  std::size_t pos = 0;
  for (std::size_t i = 1; i + p <= w.size(); ++i) {
    const std::string s = w.substr(i, p);
    if (s < best) {
      best = s;
      pos = i;
    }
  }
  return {best, pos};
}

inline std::string minimizer(const std::string& kmer, std::size_t p, bool rc) {
  std::string m = min_p(kmer, p).first;
  if (rc) m = std::min(m, min_p(reverse_complement(kmer), p).first);
  return m;
}

struct SuperKmer {
  std::uint64_t start_ordinal;
  std::string sequence;
  std::string minimizer;
  friend bool operator==(const SuperKmer&, const SuperKmer&) = default;
};

/// Groups consecutive windows with equal minimizers.
inline std::vector<SuperKmer> super_kmers(const std::string& read, std::size_t k, std::size_t p, bool rc,
                                          std::uint64_t first_ordinal = 1) {
  std::vector<SuperKmer> out;
  std::size_t start = 0;
  std::string current;
  for (std::size_t j = 0; j + k <= read.size(); ++j) {
    const std::string m = minimizer(read.substr(j, k), p, rc);
    if (j == 0) {
      current = m;
      continue;
    }
    if (m != current) {
      out.push_back({first_ordinal + start, read.substr(start, j - 1 + k - start), current});
      start = j;
      current = m;
    }
  }
  if (read.size() >= k) out.push_back({first_ordinal + start, read.substr(start), current});
  return out;
}

/// First-occurrence ordinal of every k-mer occurrence across the reads.
inline std::vector<std::uint64_t> first_occurrence_ids(const std::vector<std::string>& reads, std::size_t k, bool rc) {
  std::map<std::string, std::uint64_t> first;
  std::vector<std::uint64_t> ids;
  std::uint64_t ordinal = 0;
  for (const auto& r : reads) {
    for (std::size_t j = 0; j + k <= r.size(); ++j) {
      std::string x = r.substr(j, k);
      if (rc) x = canonical(x);
      ++ordinal;
      ids.push_back(first.emplace(x, ordinal).first->second);
    }
  }
  return ids;
}

struct Graph {
  std::vector<std::uint64_t> vertices;
  std::vector<std::array<std::uint64_t, 3>> edges;  // u, v, weight sorted by (u, v)
};

inline Graph graph(const std::vector<std::string>& reads, std::size_t k, bool rc) {
  const auto ids = first_occurrence_ids(reads, k, rc);
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> weights;
  std::size_t o = 0;
  for (const auto& r : reads) {
    if (r.size() < k) continue;
    const std::size_t n = r.size() - k + 1;
    for (std::size_t j = 1; j < n; ++j) ++weights[{ids[o + j - 1], ids[o + j]}];
    o += n;
  }
  Graph g;
  g.vertices = ids;
  std::sort(g.vertices.begin(), g.vertices.end());
  g.vertices.erase(std::unique(g.vertices.begin(), g.vertices.end()), g.vertices.end());
  for (const auto& [uv, w] : weights) g.edges.push_back({uv.first, uv.second, w});
  return g;
}

/// Enumerates all 4^n strings over symbols 0..3 with their probabilities.
template <class F>
void for_each_string(std::size_t n, const std::array<double, 4>& dist, F&& f) {
  std::vector<int> s(n, 0);
  const std::uint64_t total = std::uint64_t{1} << (2 * n);
  for (std::uint64_t x = 0; x < total; ++x) {
    double prob = 1;
    for (std::size_t i = 0; i < n; ++i) {
      s[n - 1 - i] = static_cast<int>((x >> (2 * i)) & 3u);
    }
    for (int c : s) prob *= dist[c];
    f(s, prob);
  }
}

/// Pr{every m-substring of a random n-string is > w}.
inline double clean_probability(const std::vector<int>& w, std::size_t n, const std::array<double, 4>& dist) {
  double total = 0;
  const std::size_t m = w.size();
  for_each_string(n, dist, [&](const std::vector<int>& s, double prob) {
    for (std::size_t i = 0; i + m <= n; ++i) {
      if (!std::lexicographical_compare(w.begin(), w.end(), s.begin() + i, s.begin() + i + m)) return;
    }
    total += prob;
  });
  return total;
}

/// Pr{the minimum m-substring of a random n-string equals w}.
inline double min_word_probability(const std::vector<int>& w, std::size_t n, const std::array<double, 4>& dist) {
  double total = 0;
  const std::size_t m = w.size();
  for_each_string(n, dist, [&](const std::vector<int>& s, double prob) {
    std::vector<int> best(s.begin(), s.begin() + m);
    for (std::size_t i = 1; i + m <= n; ++i) {
      std::vector<int> cand(s.begin() + i, s.begin() + i + m);
      if (cand < best) best = cand;
    }
    if (best == w) total += prob;
  });
  return total;
}

/// Fraction of 4^k uniform strings containing p zeros in a row.
inline double containment_fraction(std::size_t k, std::size_t p) {
  std::uint64_t hits = 0;
  const std::array<double, 4> uniform{1, 1, 1, 1};
  for_each_string(k, uniform, [&](const std::vector<int>& s, double) {
    std::size_t run = 0;
    for (int c : s) {
      run = c == 0 ? run + 1 : 0;
      if (run >= p) {
        ++hits;
        return;
      }
    }
  });
  return static_cast<double>(hits) / std::pow(4.0, static_cast<double>(k));
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("msp-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
