#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace msp {

/// Probabilities of symbols 0..3 in a random string.
struct SymbolDistribution {
  std::array<double, 4> p{0.25, 0.25, 0.25, 0.25};

  SymbolDistribution() = default;
  /// Throws std::invalid_argument unless every entry is in [0,1] and they sum
  /// to 1 within 1e-12.
  explicit SymbolDistribution(std::array<double, 4> probabilities);

  static SymbolDistribution uniform() { return {}; }
  /// Probability that a symbol is strictly greater than `c`.
  double greater_than(unsigned c) const noexcept;
};

using Word = std::vector<std::uint8_t>;  // symbols 0..3

/// Q has n+1 rows and m columns. Q[n][0] is the probability that a random
/// n-string has no m-substring lexicographically <= word ("clean").
struct DPTable {
  Word word;
  std::size_t n = 0;
  std::vector<double> q;         // row-major, (n+1) x m
  std::uint64_t cells_filled = 0;

  std::size_t m() const noexcept { return word.size(); }
  double at(std::size_t i, std::size_t j) const { return q.at(i * m() + j); }
  double clean() const { return at(n, 0); }
};

/// Fills the MinSTB table. Requires 1 <= |word| <= n and symbols in 0..3.
DPTable minstb(const Word& word, std::size_t n, const SymbolDistribution& dist = {});

/// Probability that the minimum m-substring of a random n-string equals `word`.
double prob_min_word(const Word& word, std::size_t n, const SymbolDistribution& dist = {});

Word word_from_value(std::uint64_t value, std::size_t m);
std::uint64_t word_value(const Word& word);

struct CapacityDistribution {
  std::vector<double> fraction;  // indexed by packed word value
  bool monte_carlo = false;
  std::uint64_t trials = 0;
};

/// Per p-word probability that it is the minimum p-substring of a random
/// k-mer. Exhaustive for p <= 8; larger p needs `allow_monte_carlo`, in
/// which case `trials` random k-mers are drawn from `seed`.
CapacityDistribution capacity_distribution(unsigned k, unsigned p, const SymbolDistribution& dist = {},
                                           bool allow_monte_carlo = false, std::uint64_t trials = 1000000,
                                           std::uint64_t seed = 1);

/// Probability that a uniform random k-mer contains 0^p, from the recurrence
/// alpha(k) = alpha(k-1) + (1 - alpha(k-p-1)) * 3/4 * 4^-p, alpha(p) = 4^-p.
double alpha(unsigned k, unsigned p);

struct ModelEstimate {
  double mean = 0;
  double std_error = 0;
  std::uint64_t trials = 0;
};

/// Mean breaks per uniform random read of length m under simple_scan.
/// Trials run in fixed blocks with per-block seeds, so the result does not
/// depend on `threads`.
ModelEstimate simulate_breaks(unsigned m, unsigned k, unsigned p, std::uint64_t trials, std::uint64_t seed = 1,
                              unsigned threads = 1, bool rc_mode = false);

/// Monte Carlo P1(k,p): fraction of random (k+1)-strings whose first or last
/// p-substring is the unique minimum.
ModelEstimate estimate_p1(unsigned k, unsigned p, std::uint64_t trials, std::uint64_t seed = 1);
/// Exact P1(k,p) by enumerating all 4^(k+1) strings (k+1 <= 13).
double exact_p1(unsigned k, unsigned p);

struct P1Report {
  unsigned k = 0, p = 0, a = 0;
  ModelEstimate base;     // P1(k, p)
  ModelEstimate shifted;  // P1(k+a, p+a)
  double rhs = 0;         // 2 P1(k,p) + (p+2)/4^p
  bool shift_holds = false;  // P1(k+a,p+a) <= rhs within 3 sigma
  double break_bound = 0;    // (p+1)/(k+1)
  bool bound_holds = false;  // P1(k,p) <= (p+1)/(k+1) within 3 sigma
};

P1Report p1_inequalities(unsigned k, unsigned p, unsigned a, std::uint64_t trials, std::uint64_t seed = 1);

/// Expected total partition bases n + (l k / m) n for mean breaks l per read.
double total_size_estimate(double n_bases, unsigned m, unsigned k, double mean_breaks);
/// Same, with the mean break count simulated.
double total_size_estimate(double n_bases, unsigned m, unsigned k, unsigned p, std::uint64_t trials,
                           std::uint64_t seed = 1);

}  // namespace msp
