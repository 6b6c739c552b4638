// Acceptance suite. Usage: msp_acceptance <criterion 1-10 | all>
// Prints one PASS/FAIL line per check and exits non-zero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "msp/analysis.hpp"
#include "msp/map_merge.hpp"
#include "msp/minimizer.hpp"
#include "msp/partitioning.hpp"
#include "msp/pipeline.hpp"
#include "msp/read_stream.hpp"
#include "oracles.hpp"

using namespace msp;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kCorpusSecondsLimit = 300.0;  // criterion 1, per corpus
constexpr double kSigmas = 3.0;                // criteria 7 and 8
constexpr double kBreakSecondsLimit = 60.0;    // criterion 7
constexpr double kSizeFactor = 8.4;            // criterion 6
constexpr double kMinstbTolerance = 1e-12;     // criterion 9
constexpr double kNormalizationTolerance = 1e-9;
constexpr double kByteRatioLimit = 1.0 / 5.0;  // criterion 10
constexpr double kTableFactorLimit = 2.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, ...) {
  char buf[1024];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

class Report {
 public:
  explicit Report(int criterion) : criterion_(criterion) {}

  bool check(const std::string& name, bool ok, const std::string& detail = {}) {
    std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion_, name.c_str(), detail.empty() ? "" : " | ",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures_;
    return ok;
  }
  void note(const std::string& text) {
    std::printf("INFO criterion %d: %s\n", criterion_, text.c_str());
    std::fflush(stdout);
  }
  int failures() const noexcept { return failures_; }

 private:
  int criterion_;
  int failures_ = 0;
};

fs::path work_root() {
  const char* env = std::getenv("MSP_ACCEPT_WORKDIR");
  fs::path root = env && *env ? fs::path(env) : fs::temp_directory_path() / "msp-acceptance";
  fs::create_directories(root);
  return root;
}

fs::path fresh_dir(const std::string& name) {
  auto dir = work_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::uint64_t env_u64(const char* name, std::uint64_t fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::strtoull(v, nullptr, 10) : fallback;
}

std::string partition_key(std::uint32_t i, const char* field) { return format("partition.%05u.%s", i, field); }

// ---------------------------------------------------------------------------

int criterion1() {
  Report r(1);
  const unsigned ks[] = {21, 31, 59};
  const unsigned ps[] = {4, 8, 12};
  const std::uint32_t ts[] = {1, 16, 256};
  const auto dir = fresh_dir("c1");
  std::uint64_t configs = 0, mismatches = 0;
  const int corpora = static_cast<int>(env_u64("MSP_ACCEPT_CORPORA", 20));
  for (int corpus = 0; corpus < corpora; ++corpus) {
    const auto start = Clock::now();
    std::unique_ptr<ReadStream> reads;
    std::string description;
    if (corpus == 0) {
      reads = std::make_unique<RandomReadStream>(100000, 100, 1000);
      description = "100000 uniform reads x 100 bp";
    } else {
      const std::size_t genome = 5000 + 2500 * corpus;
      const std::uint64_t count = 1000 + 250 * corpus;
      reads = std::make_unique<GenomeSampleStream>(genome, count, 15, 100, 1000 + corpus);
      description = format("%llu reads of 15-100 bp from a %zu bp genome", static_cast<unsigned long long>(count), genome);
    }
    std::uint64_t corpus_mismatches = 0;
    for (bool rc : {false, true}) {
      for (unsigned k : ks) {
        reads->rewind();
        const auto reference = reference_build(*reads, k, rc);
        for (unsigned p : ps) {
          for (std::uint32_t t : ts) {
            BuildOptions opts;
            opts.partition.k = k;
            opts.partition.p = p;
            opts.partition.t = t;
            opts.partition.rc_mode = rc;
            opts.partition.work_dir = dir;
            opts.partition.memory_budget = std::uint64_t{2} << 30;
            reads->rewind();
            build(*reads, opts);
            // Equal first-occurrence id streams imply equal vertex sets.
            const WorkLayout layout{dir};
            const bool same =
                read_id_stream(layout.ids()) == reference.ids && read_edge_list(layout.edges()) == reference.graph.edges;
            ++configs;
            if (!same) {
              ++corpus_mismatches;
              r.note(format("corpus %d k=%u p=%u t=%u rc=%d: graph differs", corpus, k, p, t, rc));
            }
          }
        }
      }
    }
    mismatches += corpus_mismatches;
    const double secs = seconds_since(start);
    r.check(format("corpus %02d graphs equal reference for 54 configs", corpus), corpus_mismatches == 0,
            description + format(", %llu mismatches", static_cast<unsigned long long>(corpus_mismatches)));
    r.check(format("corpus %02d runtime < %.0f s", corpus, kCorpusSecondsLimit), secs < kCorpusSecondsLimit,
            format("%.1f s", secs));
  }
  r.note(format("%llu configurations, %llu mismatches", static_cast<unsigned long long>(configs),
                static_cast<unsigned long long>(mismatches)));
  fs::remove_all(dir);
  return r.failures();
}

int criterion2() {
  Report r(2);
  const auto dir = fresh_dir("c2");
  for (int corpus = 0; corpus < 5; ++corpus) {
    GenomeSampleStream reads(50000, 10000, 40, 150, 2000 + corpus);
    const bool rc = corpus % 2 == 0;

    BuildOptions opts;
    opts.partition.k = 31;
    opts.partition.p = 8;
    opts.partition.t = 64;
    opts.partition.rc_mode = rc;
    opts.partition.work_dir = dir / "msp";
    run_partition(reads, opts);
    run_map(opts.partition.work_dir, std::uint64_t{2} << 30);
    run_merge(opts.partition.work_dir);
    const auto msp_ids = normalize_classes(read_id_stream(WorkLayout{opts.partition.work_dir}.ids()));

    BaselineConfig cfg;
    cfg.k = 31;
    cfg.t = 64;
    cfg.rc_mode = rc;
    cfg.work_dir = dir / "baseline";
    reads.rewind();
    const auto h = h_partition(reads, cfg);
    const auto h_ids = normalize_classes(read_id_stream(h.id_stream));
    reads.rewind();
    const auto b = b_partition(reads, cfg);
    const auto b_ids = normalize_classes(read_id_stream(b.id_stream));

    const std::string detail = format("N=%zu V(h)=%llu V(b)=%llu rc=%d", msp_ids.size(),
                                      static_cast<unsigned long long>(h.distinct_kmers),
                                      static_cast<unsigned long long>(b.distinct_kmers), rc);
    r.check(format("corpus %d MSP and H-Partition classes identical", corpus), msp_ids == h_ids, detail);
    r.check(format("corpus %d MSP and B-Partition classes identical", corpus), msp_ids == b_ids, detail);
  }
  fs::remove_all(dir);
  return r.failures();
}

int criterion3() {
  Report r(3);
  const auto scan = simple_scan(pack("GTAATGAC"), 5, 3);
  std::string listing;
  for (const auto& s : scan.super_kmers) listing += s.sequence.to_string() + "->" + s.minimizer.to_string() + " ";
  r.check("super k-mers are GTAATGA->AAT, ATGAC->ATG",
          scan.super_kmers.size() == 2 && scan.super_kmers[0].sequence.to_string() == "GTAATGA" &&
              scan.super_kmers[0].minimizer.to_string() == "AAT" &&
              scan.super_kmers[1].sequence.to_string() == "ATGAC" &&
              scan.super_kmers[1].minimizer.to_string() == "ATG",
          listing);

  // Filler reads of C only place the fixture's k-mers at ordinals 7..10 and
  // 81..84; their own k-mers fall in the CCC partition.
  struct Layout {
    std::vector<std::string> reads;
    ReplacementRange aat, atg;
    std::uint64_t first, second;
  };
  const std::vector<Layout> layouts{
      {{"GTAATGAC", "GTAATGAC"}, {5, 1, 3}, {8, 4, 1}, 1, 5},
      {{std::string(10, 'C'), "GTAATGAC", std::string(74, 'C'), "GTAATGAC"}, {81, 7, 3}, {84, 10, 1}, 7, 81},
  };
  const auto dir = fresh_dir("c3");
  for (const auto& layout : layouts) {
    auto reads = VectorReadStream::from_strings(layout.reads);
    BuildOptions opts;
    opts.partition.k = 5;
    opts.partition.p = 3;
    opts.partition.t = 64;
    opts.partition.rc_mode = false;
    opts.partition.wrap = WrapMode::identity;
    opts.partition.work_dir = dir;
    build(reads, opts);
    const WorkLayout w{dir};
    const auto aat = read_replacement_file(w.replacement(static_cast<std::uint32_t>(pack("AAT").value())));
    const auto atg = read_replacement_file(w.replacement(static_cast<std::uint32_t>(pack("ATG").value())));
    auto describe = [](const std::vector<ReplacementRange>& v) {
      std::string s;
      for (const auto& x : v)
        s += format("%llu->%llu: %u ", static_cast<unsigned long long>(x.from_start),
                    static_cast<unsigned long long>(x.to_start), x.count);
      return s;
    };
    const auto& a = layout.aat;
    const auto& b = layout.atg;
    r.check(format("AAT partition holds range %llu->%llu: 3", static_cast<unsigned long long>(a.from_start),
                   static_cast<unsigned long long>(a.to_start)),
            aat == std::vector<ReplacementRange>{a}, describe(aat));
    r.check(format("ATG partition holds range %llu->%llu: 1", static_cast<unsigned long long>(b.from_start),
                   static_cast<unsigned long long>(b.to_start)),
            atg == std::vector<ReplacementRange>{b}, describe(atg));
    const auto ids = read_id_stream(w.ids());
    const std::vector<std::uint64_t> first(ids.begin() + (layout.first - 1), ids.begin() + (layout.first + 3));
    const std::vector<std::uint64_t> second(ids.begin() + (layout.second - 1), ids.begin() + (layout.second + 3));
    const std::vector<std::uint64_t> expected{layout.first, layout.first + 1, layout.first + 2, layout.first + 3};
    r.check(format("both reads carry ids %llu..%llu", static_cast<unsigned long long>(layout.first),
                   static_cast<unsigned long long>(layout.first + 3)),
            first == expected && second == expected);
  }
  fs::remove_all(dir);
  return r.failures();
}

int criterion4() {
  Report r(4);
  const unsigned m = 100, k = 59, p = 12;
  RandomReadStream reads(100000, m, 4000);
  PackedSequence read;
  std::uint64_t total = 0, within = 0, worst_slack = ~std::uint64_t{0};
  while (reads.next(read)) {
    const auto s = simple_scan(read, k, p);
    const std::uint64_t l = s.stats.breaks;
    const std::uint64_t bound = m + l * k - p * l - p + 1;
    ++total;
    if (s.stats.comparisons <= bound) {
      ++within;
      worst_slack = std::min(worst_slack, bound - s.stats.comparisons);
    }
  }
  r.check("comparisons <= m + lk - pl - p + 1 on every read", within == total,
          format("%llu/%llu reads within bound, minimum slack %llu", static_cast<unsigned long long>(within),
                 static_cast<unsigned long long>(total), static_cast<unsigned long long>(worst_slack)));
  return r.failures();
}

int criterion5() {
  Report r(5);
  struct Config {
    unsigned k, p;
    bool rc;
  };
  for (const Config c : {Config{31, 8, false}, Config{59, 12, true}}) {
    RandomReadStream reads(100000, 100, 5000 + c.k);
    PackedSequence read;
    std::uint64_t total = 0, queue_equal = 0, brute_equal = 0;
    while (reads.next(read)) {
      const ScanOptions opts{c.rc, 1};
      const auto a = simple_scan(read, c.k, c.p, opts);
      ++total;
      if (queue_scan(read, c.k, c.p, opts).super_kmers == a.super_kmers) ++queue_equal;
      if (brute_scan(read, c.k, c.p, opts).super_kmers == a.super_kmers) ++brute_equal;
    }
    const std::string label = format("k=%u p=%u rc=%d", c.k, c.p, c.rc);
    r.check("queue_scan equals simple_scan, " + label, queue_equal == total,
            format("%llu/%llu reads", static_cast<unsigned long long>(queue_equal),
                   static_cast<unsigned long long>(total)));
    r.check("brute-force grouping equals simple_scan, " + label, brute_equal == total,
            format("%llu/%llu reads", static_cast<unsigned long long>(brute_equal),
                   static_cast<unsigned long long>(total)));
  }
  return r.failures();
}

int criterion6() {
  Report r(6);
  const unsigned m = 100, k = 50, p = 10;
  const auto dir = fresh_dir("c6");
  for (int corpus = 0; corpus < 3; ++corpus) {
    RandomReadStream reads(20000, m, 6000 + corpus);
    PartitionConfig cfg;
    cfg.k = k;
    cfg.p = p;
    cfg.t = 64;
    cfg.rc_mode = corpus != 0;
    cfg.work_dir = dir;
    const auto res = msp_partition(reads, cfg);
    const std::uint64_t n = res.input_bases;
    const std::uint64_t total = res.partition_bases();
    const std::uint64_t breaks = res.breaks;
    const std::string detail =
        format("rc=%d n=%llu breaks=%llu total=%llu, n+k*breaks=%llu, n+(k-1)*breaks=%llu", cfg.rc_mode,
               static_cast<unsigned long long>(n), static_cast<unsigned long long>(breaks),
               static_cast<unsigned long long>(total), static_cast<unsigned long long>(n + k * breaks),
               static_cast<unsigned long long>(n + (k - 1) * breaks));
    r.check(format("corpus %d total partition bases == n + k*sum(breaks)", corpus), total == n + k * breaks, detail);
    r.check(format("corpus %d total partition bases == n + (k-1)*sum(breaks)", corpus), total == n + (k - 1) * breaks,
            detail);
    r.check(format("corpus %d total partition bases < %.1f n", corpus, kSizeFactor),
            static_cast<double>(total) < kSizeFactor * static_cast<double>(n),
            format("total/n = %.4f", static_cast<double>(total) / static_cast<double>(n)));
  }
  fs::remove_all(dir);
  return r.failures();
}

int criterion7() {
  Report r(7);
  const auto start = Clock::now();
  const unsigned k = 31, p = 8;
  const std::uint64_t trials = 100000;
  const unsigned ms[] = {60, 100, 150};
  std::vector<double> ratio, se;
  const double bound = (p + 1.0) / (k + 1.0);
  for (unsigned m : ms) {
    const auto est = simulate_breaks(m, k, p, trials, 7000 + m);
    ratio.push_back(est.mean / (m - k));
    se.push_back(est.std_error / (m - k));
    r.check(format("m=%u breaks/(m-k) <= (p+1)/(k+1)", m), ratio.back() <= bound,
            format("%.6f +- %.6f vs %.6f", ratio.back(), se.back(), bound));
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      const double diff = std::abs(ratio[i] - ratio[j]);
      const double tol = kSigmas * std::sqrt(se[i] * se[i] + se[j] * se[j]);
      r.check(format("breaks/(m-k) equal for m=%u and m=%u within %.0f sigma", ms[i], ms[j], kSigmas), diff <= tol,
              format("|diff| = %.6f, tolerance %.6f", diff, tol));
    }
  }
  const double secs = seconds_since(start);
  r.check(format("runtime < %.0f s", kBreakSecondsLimit), secs < kBreakSecondsLimit, format("%.1f s", secs));
  return r.failures();
}

int criterion8() {
  Report r(8);
  const unsigned p = 5;
  const std::uint32_t t = 1024;  // 4^p: identity wrap gives one partition per minimizer
  const int runs = 20;
  const auto dir = fresh_dir("c8");
  for (unsigned k : {50u, 75u, 100u}) {
    std::vector<double> fractions;
    double zero_fraction = 0;
    std::map<std::uint32_t, int> argmax;
    for (int run = 0; run < runs; ++run) {
      RandomReadStream reads(1000, 300, 8000 + 100 * k + run);
      BuildOptions opts;
      opts.partition.k = k;
      opts.partition.p = p;
      opts.partition.t = t;
      opts.partition.rc_mode = false;
      opts.partition.wrap = WrapMode::identity;
      opts.partition.work_dir = dir;
      run_partition(reads, opts);
      const auto m = run_map(dir, std::uint64_t{1} << 30);
      std::uint64_t largest = 0;
      std::uint32_t where = 0;
      for (std::uint32_t i = 0; i < t; ++i) {
        const std::uint64_t d = m.get_u64(partition_key(i, "distinct"));
        if (d > largest) {
          largest = d;
          where = i;
        }
      }
      ++argmax[where];
      const double v = static_cast<double>(m.get_u64("V"));
      fractions.push_back(static_cast<double>(largest) / v);
      zero_fraction += static_cast<double>(m.get_u64(partition_key(0, "distinct"))) / v / runs;
    }
    double mean = 0;
    for (double f : fractions) mean += f;
    mean /= runs;
    double var = 0;
    for (double f : fractions) var += (f - mean) * (f - mean);
    const double se = std::sqrt(var / (runs - 1) / runs);
    const double scale = std::pow(4.0, p + 1.0);
    const double lo = 2.0 * k / scale, hi = 3.0 * k / scale;
    r.check(format("k=%u largest partition fraction in (2k/4^(p+1), 3k/4^(p+1))", k),
            mean > lo - kSigmas * se && mean < hi + kSigmas * se,
            format("%.5f +- %.5f in (%.5f, %.5f); containment probability %.5f", mean, se, lo, hi, alpha(k, p)));
    std::string where;
    for (const auto& [i, n] : argmax) where += format(" %s:%d", PackedSequence::from_value(i, p).to_string().c_str(), n);
    r.note(format("k=%u 0^p partition fraction %.5f; largest partition by run:%s", k, zero_fraction, where.c_str()));
  }
  fs::remove_all(dir);
  return r.failures();
}

int criterion9() {
  Report r(9);
  const auto start = Clock::now();
  const std::array<std::array<double, 4>, 2> dists{{{0.25, 0.25, 0.25, 0.25}, {0.4, 0.1, 0.2, 0.3}}};
  double worst_clean = 0, worst_min = 0, worst_sum = 0;
  std::uint64_t cases = 0;
  for (const auto& d : dists) {
    const SymbolDistribution dist(d);
    for (std::size_t m = 1; m <= 3; ++m) {
      for (std::size_t n = m; n <= 8; ++n) {
        double sum = 0;
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << (2 * m)); ++v) {
          const Word w = word_from_value(v, m);
          const std::vector<int> wi(w.begin(), w.end());
          worst_clean = std::max(worst_clean, std::abs(minstb(w, n, dist).clean() - oracle::clean_probability(wi, n, d)));
          const double pm = prob_min_word(w, n, dist);
          worst_min = std::max(worst_min, std::abs(pm - oracle::min_word_probability(wi, n, d)));
          sum += pm;
          ++cases;
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      }
    }
  }
  r.check("clean probability matches enumeration for n <= 8, m <= 3", worst_clean <= kMinstbTolerance,
          format("%llu cases, max error %.3g", static_cast<unsigned long long>(cases), worst_clean));
  r.check("minimum-word probability matches enumeration", worst_min <= kMinstbTolerance,
          format("max error %.3g", worst_min));
  r.check("sum over words of prob_min_word is 1", worst_sum <= kNormalizationTolerance,
          format("max deviation %.3g", worst_sum));
  bool exact = true;
  for (unsigned q = 1; q <= 32; ++q) exact = exact && alpha(q, q) == std::ldexp(1.0, -2 * static_cast<int>(q));
  r.check("alpha(p,p) == 4^-p exactly for p = 1..32", exact);
  const double a82 = alpha(8, 2), e82 = oracle::containment_fraction(8, 2);
  r.check("alpha(8,2) matches enumeration", std::abs(a82 - e82) <= kMinstbTolerance,
          format("%.15f vs %.15f", a82, e82));
  r.note(format("runtime %.2f s", seconds_since(start)));
  return r.failures();
}

int criterion10() {
  Report r(10);
  const unsigned m = 100, k = 31, p = 4;
  const std::uint32_t t = 256;  // 4^p with identity wrap
  const std::uint64_t bases = env_u64("MSP_ACCEPT_CORPUS_BASES", 1000000000ULL);
  const std::uint64_t count = bases / m;
  const std::uint64_t budget = std::uint64_t{4} << 30;
  r.note(format("corpus %llu uniform reads x %u bp, k=%u p=%u t=%u, forward strand",
                static_cast<unsigned long long>(count), m, k, p, t));
  const auto dir = fresh_dir("c10");

  RandomReadStream reads(count, m, 10000);
  BuildOptions opts;
  opts.partition.k = k;
  opts.partition.p = p;
  opts.partition.t = t;
  opts.partition.rc_mode = false;
  opts.partition.wrap = WrapMode::identity;
  opts.partition.work_dir = dir / "msp";
  opts.partition.memory_budget = budget;
  auto start = Clock::now();
  run_partition(reads, opts);
  const auto mm = run_map(opts.partition.work_dir, budget);
  r.note(format("MSP partition+map %.1f s", seconds_since(start)));
  const std::uint64_t msp_bytes = mm.get_u64("partition_bytes");
  const std::uint64_t peak = mm.get_u64("map.peak_table_entries");
  const std::uint64_t v = mm.get_u64("V");
  fs::remove_all(opts.partition.work_dir);

  BaselineConfig cfg;
  cfg.k = k;
  cfg.t = t;
  cfg.rc_mode = false;
  cfg.work_dir = dir / "b";
  cfg.memory_budget = budget;
  reads.rewind();
  start = Clock::now();
  const auto b = b_partition(reads, cfg);
  r.note(format("B-Partition %.1f s", seconds_since(start)));
  fs::remove_all(dir);

  const double ratio = static_cast<double>(msp_bytes) / static_cast<double>(b.spill_bytes);
  r.check("MSP partition bytes < 1/5 of B-Partition spilled k-mer bytes", ratio < kByteRatioLimit,
          format("%llu / %llu = %.4f", static_cast<unsigned long long>(msp_bytes),
                 static_cast<unsigned long long>(b.spill_bytes), ratio));
  const double predicted = 3.0 * k / std::pow(4.0, p + 1.0) * static_cast<double>(v);
  r.check("peak mapper table entries < 2x the 3k/4^(p+1) capacity bound", peak < kTableFactorLimit * predicted,
          format("peak %llu, bound %.0f (V=%llu), ratio %.3f; containment estimate %.0f",
                 static_cast<unsigned long long>(peak), predicted, static_cast<unsigned long long>(v),
                 static_cast<double>(peak) / predicted, alpha(k, p) * static_cast<double>(v)));
  return r.failures();
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<int()>> criteria{
      {"1", criterion1}, {"2", criterion2}, {"3", criterion3}, {"4", criterion4},  {"5", criterion5},
      {"6", criterion6}, {"7", criterion7}, {"8", criterion8}, {"9", criterion9}, {"10", criterion10},
  };
  if (argc != 2 || (std::string(argv[1]) != "all" && !criteria.count(argv[1]))) {
    std::fprintf(stderr, "usage: %s <1-10|all>\n", argv[0]);
    return 2;
  }
  int failures = 0;
  try {
    if (std::string(argv[1]) == "all") {
      for (int i = 1; i <= 10; ++i) failures += criteria.at(std::to_string(i))();
    } else {
      failures = criteria.at(argv[1])();
    }
  } catch (const std::exception& e) {
    std::printf("FAIL criterion %s: aborted with exception: %s\n", argv[1], e.what());
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
