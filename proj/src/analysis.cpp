#include "msp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "msp/minimizer.hpp"
#include "msp/read_stream.hpp"

namespace msp {

SymbolDistribution::SymbolDistribution(std::array<double, 4> probabilities) : p(probabilities) {
  double sum = 0;
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("symbol probabilities must lie in [0, 1]");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("symbol probabilities must sum to 1");
}

double SymbolDistribution::greater_than(unsigned c) const noexcept {
  double s = 0;
  for (unsigned i = c + 1; i < 4; ++i) s += p[i];
  return s;
}

Word word_from_value(std::uint64_t value, std::size_t m) {
  Word w(m);
  for (std::size_t i = 0; i < m; ++i) w[m - 1 - i] = static_cast<std::uint8_t>((value >> (2 * i)) & 3u);
  return w;
}

std::uint64_t word_value(const Word& word) {
  std::uint64_t v = 0;
  for (auto c : word) v = (v << 2) | c;
  return v;
}

namespace {

void check_word(const Word& word, std::size_t n) {
  if (word.empty()) throw std::invalid_argument("word must not be empty");
  if (word.size() > n) throw std::invalid_argument("word longer than the string length n");
  for (auto c : word) {
    if (c > 3) throw std::invalid_argument("word symbols must be in 0..3");
  }
}

}  // namespace

// The recurrence runs over the reversed word: r[j] below is word[m-j]. With
// that orientation the case analysis for w_m = w_j compares the word's
// symbols 1..j-1 against its last j-1 symbols.
DPTable minstb(const Word& word, std::size_t n, const SymbolDistribution& dist) {
  check_word(word, n);
  const std::size_t m = word.size();
  DPTable t;
  t.word = word;
  t.n = n;
  t.q.assign((n + 1) * m, 0.0);
  auto Q = [&](std::size_t i, std::size_t j) -> double& { return t.q[i * m + j]; };
  auto set = [&](std::size_t i, std::size_t j, double v) {
    Q(i, j) = v;
    ++t.cells_filled;
  };
  std::vector<unsigned> r(m + 1);
  for (std::size_t j = 1; j <= m; ++j) r[j] = word[m - j];
  std::vector<char> tail_greater(m + 1, 0);
  for (std::size_t j = 2; j < m; ++j) {
    tail_greater[j] = std::lexicographical_compare(word.begin() + static_cast<std::ptrdiff_t>(m - j + 1), word.end(),
                                                   word.begin() + 1, word.begin() + static_cast<std::ptrdiff_t>(j));
  }
  auto gt = [&](unsigned c) { return dist.greater_than(c); };
  auto pr = [&](unsigned c) { return dist.p[c]; };

  for (std::size_t j = 0; j < m; ++j) set(0, j, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < m) {
      set(i + 1, 0, 1.0);
      set(i + 1, 1, gt(r[1]));
      for (std::size_t j = 2; j < m; ++j) set(i + 1, j, gt(r[j]) + Q(i, j - 1) * pr(r[j]));
      continue;
    }
    const double q0 = Q(i, 0);
    if (m == 1) {
      set(i + 1, 0, q0 * gt(r[1]));
      continue;
    }
    const double full = q0 * gt(r[m]) + Q(i, m - 1) * pr(r[m]);
    set(i + 1, 0, full);
    for (std::size_t j = 1; j < m; ++j) {
      double v = 0;
      if (r[m] > r[j]) {
        v = full;
      } else if (j == 1) {
        v = q0 * gt(r[1]);
      } else if (r[m] < r[j] || !tail_greater[j]) {
        v = q0 * gt(r[j]) + Q(i, j - 1) * pr(r[j]);
      } else {
        v = q0 * gt(r[j]) + Q(i, m - 1) * pr(r[j]);
      }
      set(i + 1, j, v);
    }
  }
  return t;
}

double prob_min_word(const Word& word, std::size_t n, const SymbolDistribution& dist) {
  check_word(word, n);
  const double clean = minstb(word, n, dist).clean();
  const std::uint64_t v = word_value(word);
  if (v == 0) return 1.0 - clean;
  return minstb(word_from_value(v - 1, word.size()), n, dist).clean() - clean;
}

namespace {

std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

unsigned draw_symbol(std::mt19937_64& rng, const SymbolDistribution& dist) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0;
  for (unsigned c = 0; c < 3; ++c) {
    acc += dist.p[c];
    if (u < acc) return c;
  }
  return 3;
}

constexpr std::uint64_t kBlock = 4096;

struct Moments {
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;
};

// Runs ceil(trials / kBlock) seeded blocks over `threads` workers; trial(rng)
// returns a non-negative integer outcome.
template <class MakeTrial>
ModelEstimate run_blocks(std::uint64_t trials, std::uint64_t seed, unsigned threads, MakeTrial make_trial) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<Moments> per_block(blocks);
  threads = std::max(1u, threads);
  auto work = [&](unsigned w) {
    auto trial = make_trial();
    for (std::uint64_t b = w; b < blocks; b += threads) {
      auto rng = block_rng(seed, b);
      const std::uint64_t count = std::min(kBlock, trials - b * kBlock);
      Moments mo;
      for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t x = trial(rng);
        mo.sum += x;
        mo.sum_sq += x * x;
      }
      per_block[b] = mo;
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  Moments total;
  for (const auto& mo : per_block) {
    total.sum += mo.sum;
    total.sum_sq += mo.sum_sq;
  }
  ModelEstimate e;
  e.trials = trials;
  const double n = static_cast<double>(trials);
  e.mean = static_cast<double>(total.sum) / n;
  if (trials > 1) {
    const double var = (static_cast<double>(total.sum_sq) - n * e.mean * e.mean) / (n - 1);
    e.std_error = std::sqrt(std::max(0.0, var) / n);
  }
  return e;
}

std::uint64_t min_word_of(const std::vector<unsigned>& s, std::size_t start, std::size_t len, unsigned p) {
  std::uint64_t best = ~std::uint64_t{0};
  std::uint64_t v = 0;
  const std::uint64_t mask = p == 32 ? ~std::uint64_t{0} : (std::uint64_t{1} << (2 * p)) - 1;
  for (std::size_t i = 0; i < len; ++i) {
    v = ((v << 2) | s[start + i]) & mask;
    if (i + 1 >= p) best = std::min(best, v);
  }
  return best;
}

// 1 when the first or the last p-substring of s is the unique minimum.
unsigned end_is_unique_min(const std::vector<unsigned>& s, unsigned p) {
  const std::size_t count = s.size() - p + 1;
  const std::uint64_t mask = p == 32 ? ~std::uint64_t{0} : (std::uint64_t{1} << (2 * p)) - 1;
  std::uint64_t v = 0;
  std::uint64_t best = ~std::uint64_t{0};
  std::size_t best_pos = 0;
  std::size_t ties = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    v = ((v << 2) | s[i]) & mask;
    if (i + 1 < p) continue;
    const std::size_t pos = i + 1 - p;
    if (v < best) {
      best = v;
      best_pos = pos;
      ties = 1;
    } else if (v == best) {
      ++ties;
    }
  }
  return ties == 1 && (best_pos == 0 || best_pos == count - 1) ? 1u : 0u;
}

}  // namespace

CapacityDistribution capacity_distribution(unsigned k, unsigned p, const SymbolDistribution& dist,
                                           bool allow_monte_carlo, std::uint64_t trials, std::uint64_t seed) {
  if (p == 0 || p > k) throw std::invalid_argument("capacity distribution needs 1 <= p <= k");
  CapacityDistribution out;
  if (p <= 8) {
    const std::uint64_t words = std::uint64_t{1} << (2 * p);
    out.fraction.resize(words);
    // clean(W) for every W, then differences of consecutive words.
    std::vector<double> clean(words);
    for (std::uint64_t v = 0; v < words; ++v) clean[v] = minstb(word_from_value(v, p), k, dist).clean();
    for (std::uint64_t v = 0; v < words; ++v) out.fraction[v] = (v == 0 ? 1.0 : clean[v - 1]) - clean[v];
    return out;
  }
  if (!allow_monte_carlo) {
    throw std::invalid_argument("exhaustive capacity distribution needs p <= 8; enable Monte Carlo for p = " +
                                std::to_string(p));
  }
  if (p > 16) throw std::invalid_argument("Monte Carlo capacity distribution supports p <= 16");
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  out.monte_carlo = true;
  out.trials = trials;
  std::vector<std::uint64_t> counts(std::uint64_t{1} << (2 * p), 0);
  std::vector<unsigned> s(k);
  for (std::uint64_t b = 0; b * kBlock < trials; ++b) {
    auto rng = block_rng(seed, b);
    const std::uint64_t count = std::min(kBlock, trials - b * kBlock);
    for (std::uint64_t i = 0; i < count; ++i) {
      for (auto& c : s) c = draw_symbol(rng, dist);
      ++counts[min_word_of(s, 0, k, p)];
    }
  }
  out.fraction.resize(counts.size());
  for (std::size_t v = 0; v < counts.size(); ++v) out.fraction[v] = static_cast<double>(counts[v]) / static_cast<double>(trials);
  return out;
}

double alpha(unsigned k, unsigned p) {
  if (p == 0 || p > k) throw std::invalid_argument("alpha needs 1 <= p <= k");
  const double base = std::pow(4.0, -static_cast<double>(p));
  std::vector<double> a(k + 1, 0.0);
  a[p] = base;
  for (unsigned j = p + 1; j <= k; ++j) {
    a[j] = a[j - 1] + (1.0 - a[j - p - 1]) * 0.75 * base;  // a[i] = 0 for i < p
  }
  return a[k];
}

ModelEstimate simulate_breaks(unsigned m, unsigned k, unsigned p, std::uint64_t trials, std::uint64_t seed,
                              unsigned threads, bool rc_mode) {
  validate_kp(k, p);
  if (k > m) throw std::invalid_argument("simulate_breaks needs k <= m");
  return run_blocks(trials, seed, threads, [&] {
    return [scanner = SegmentScanner(k, p, rc_mode, Scanner::simple), segments = std::vector<Segment>(),
            m](std::mt19937_64& rng) mutable {
      const PackedSequence read = random_sequence(m, rng);
      return scanner.scan(read, segments).breaks;
    };
  });
}

ModelEstimate estimate_p1(unsigned k, unsigned p, std::uint64_t trials, std::uint64_t seed) {
  validate_kp(k, p);
  return run_blocks(trials, seed, 1, [&] {
    return [s = std::vector<unsigned>(k + 1), p](std::mt19937_64& rng) mutable {
      for (auto& c : s) c = static_cast<unsigned>(rng() & 3u);
      return end_is_unique_min(s, p);
    };
  });
}

double exact_p1(unsigned k, unsigned p) {
  validate_kp(k, p);
  if (k + 1 > 13) throw std::invalid_argument("exact P1 enumerates 4^(k+1) strings; needs k <= 12");
  const std::uint64_t total = std::uint64_t{1} << (2 * (k + 1));
  std::vector<unsigned> s(k + 1);
  std::uint64_t hits = 0;
  for (std::uint64_t x = 0; x < total; ++x) {
    for (unsigned i = 0; i <= k; ++i) s[k - i] = static_cast<unsigned>((x >> (2 * i)) & 3u);
    hits += end_is_unique_min(s, p);
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

P1Report p1_inequalities(unsigned k, unsigned p, unsigned a, std::uint64_t trials, std::uint64_t seed) {
  P1Report r;
  r.k = k;
  r.p = p;
  r.a = a;
  r.base = estimate_p1(k, p, trials, seed);
  r.shifted = estimate_p1(k + a, p + a, trials, seed + 1);
  const double tail = (p + 2.0) / std::pow(4.0, p);
  r.rhs = 2 * r.base.mean + tail;
  const double sigma = std::sqrt(r.shifted.std_error * r.shifted.std_error + 4 * r.base.std_error * r.base.std_error);
  r.shift_holds = r.shifted.mean <= r.rhs + 3 * sigma;
  r.break_bound = (p + 1.0) / (k + 1.0);
  r.bound_holds = r.base.mean <= r.break_bound + 3 * r.base.std_error;
  return r;
}

double total_size_estimate(double n_bases, unsigned m, unsigned k, double mean_breaks) {
  if (m == 0) throw std::invalid_argument("read length must be positive");
  return n_bases + mean_breaks * k / m * n_bases;
}

double total_size_estimate(double n_bases, unsigned m, unsigned k, unsigned p, std::uint64_t trials,
                           std::uint64_t seed) {
  return total_size_estimate(n_bases, m, k, simulate_breaks(m, k, p, trials, seed).mean);
}

}  // namespace msp
