#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "msp/minimizer.hpp"
#include "msp/partitioning.hpp"
#include "oracles.hpp"

using namespace msp;

namespace {

std::vector<oracle::SuperKmer> as_oracle(const ScanResult& r) {
  std::vector<oracle::SuperKmer> out;
  for (const auto& s : r.super_kmers) out.push_back({s.start_ordinal, s.sequence.to_string(), s.minimizer.to_string()});
  return out;
}

}  // namespace

TEST_SUITE("minimizer") {
  TEST_CASE("minimum p-substring examples") {
    auto r = min_p_bruteforce(pack("GTAAT"), 3);
    CHECK(r.substring.to_string() == "AAT");
    CHECK(r.position == 2);

    r = min_p_bruteforce(pack("ACTGATTATTAACCGTA"), 4);
    CHECK(r.substring.to_string() == "AACC");
    CHECK(r.position == 10);

    r = min_p_rc(pack("AAAT"), 2);
    CHECK(r.substring.to_string() == "AA");
    CHECK(r.strand == Strand::forward);

    r = min_p_rc(pack("TTTC"), 2);
    CHECK(r.substring.to_string() == "AA");
    CHECK(r.strand == Strand::reverse);
  }

  TEST_CASE("leftmost position on ties") {
    const auto r = min_p_bruteforce(pack("CAACAAC"), 2);
    CHECK(r.substring.to_string() == "AA");
    CHECK(r.position == 1);
  }

  TEST_CASE("invalid p is rejected") {
    CHECK_THROWS_AS(min_p_bruteforce(pack("ACGT"), 0), std::invalid_argument);
    CHECK_THROWS_AS(min_p_bruteforce(pack("ACGT"), 5), std::invalid_argument);
    CHECK_THROWS_AS(validate_kp(10, 11), std::invalid_argument);
    CHECK_THROWS_AS(validate_kp(40, 33), std::invalid_argument);
    CHECK_NOTHROW(validate_kp(128, 32));
  }

  TEST_CASE("super k-mers of the two-read fixture") {
    const auto r = simple_scan(pack("GTAATGAC"), 5, 3);
    REQUIRE(r.super_kmers.size() == 2);
    CHECK(r.super_kmers[0].sequence.to_string() == "GTAATGA");
    CHECK(r.super_kmers[0].minimizer.to_string() == "AAT");
    CHECK(r.super_kmers[0].start_ordinal == 1);
    CHECK(r.super_kmers[1].sequence.to_string() == "ATGAC");
    CHECK(r.super_kmers[1].minimizer.to_string() == "ATG");
    CHECK(r.super_kmers[1].start_ordinal == 4);
    CHECK(r.stats.breaks == 1);
  }

  TEST_CASE("scanners agree with the string oracle") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 3000; ++trial) {
      const unsigned k = 1 + rng() % 40;
      const unsigned p = 1 + rng() % std::min(k, 12u);
      const bool rc = rng() & 1;
      const std::string s = oracle::random_dna(k + rng() % 80, rng);
      // Low-entropy reads exercise ties.
      std::string read = s;
      if (trial % 3 == 0)
        for (auto& c : read) c = "AC"[rng() & 1];
      const auto expected = oracle::super_kmers(read, k, p, rc, 7);
      const ScanOptions opts{rc, 7};
      const auto packed = pack(read);
      const auto a = simple_scan(packed, k, p, opts);
      const auto b = queue_scan(packed, k, p, opts);
      const auto c = brute_scan(packed, k, p, opts);
      REQUIRE(as_oracle(a) == expected);
      CHECK(b.super_kmers == a.super_kmers);
      CHECK(c.super_kmers == a.super_kmers);
      CHECK(a.stats.breaks == expected.size() - 1);
      CHECK(b.stats.breaks == a.stats.breaks);
    }
  }

  TEST_CASE("super k-mers cover the read and overlap by k-1") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 1000; ++trial) {
      const unsigned k = 5 + rng() % 50;
      const unsigned p = 1 + rng() % std::min(k, 16u);
      const auto read = pack(oracle::random_dna(k + rng() % 200, rng));
      const auto r = simple_scan(read, k, p, {bool(rng() & 1), 1});
      std::uint64_t kmers = 0;
      std::size_t pos = 0;
      for (const auto& s : r.super_kmers) {
        CHECK(s.start_ordinal == pos + 1);
        CHECK(s.sequence == read.subsequence(pos, s.sequence.size()));
        kmers += s.kmer_count(k);
        pos += s.kmer_count(k);
      }
      CHECK(kmers == read.size() - k + 1);
      CHECK(r.super_kmers.size() == r.stats.breaks + 1);
    }
  }

  TEST_CASE("simple scan stays within the comparison bound") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 3000; ++trial) {
      const unsigned k = 2 + rng() % 60;
      const unsigned p = 1 + rng() % std::min(k, 20u);
      std::string s = oracle::random_dna(k + rng() % 150, rng);
      if (trial % 4 == 0) s.assign(s.size(), 'A');
      if (trial % 4 == 1)
        for (auto& c : s) c = "AT"[rng() & 1];
      const auto r = simple_scan(pack(s), k, p);
      const std::uint64_t m = s.size(), l = r.stats.breaks;
      CHECK(r.stats.comparisons <= m + l * k - p * l - p + 1);
    }
  }

  TEST_CASE("reverse-complement mode yields the same minimizer multiset on both strands") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 500; ++trial) {
      const unsigned k = 3 + rng() % 40;
      const unsigned p = 1 + rng() % std::min(k, 10u);
      const auto read = pack(oracle::random_dna(k + rng() % 100, rng));
      std::multiset<std::string> fwd, rev;
      for (const auto& s : simple_scan(read, k, p, {true, 1}).super_kmers)
        for (std::size_t i = 0; i < s.kmer_count(k); ++i) fwd.insert(s.minimizer.to_string());
      for (const auto& s : simple_scan(reverse_complement(read), k, p, {true, 1}).super_kmers)
        for (std::size_t i = 0; i < s.kmer_count(k); ++i) rev.insert(s.minimizer.to_string());
      CHECK(fwd == rev);
    }
  }

  TEST_CASE("segment scanner matches scan results") {
    std::mt19937_64 rng(17);
    for (Scanner sc : {Scanner::simple, Scanner::queue, Scanner::brute}) {
      SegmentScanner scanner(31, 8, true, sc);
      std::vector<Segment> segs;
      for (int trial = 0; trial < 200; ++trial) {
        const auto read = pack(oracle::random_dna(31 + rng() % 150, rng));
        scanner.scan(read, segs);
        const auto r = simple_scan(read, 31, 8, {true, 1});
        REQUIRE(segs.size() == r.super_kmers.size());
        for (std::size_t i = 0; i < segs.size(); ++i) {
          CHECK(segs[i].first_window + 1 == r.super_kmers[i].start_ordinal);
          CHECK(segs[i].windows == r.super_kmers[i].kmer_count(31));
          CHECK(segs[i].minimizer == r.super_kmers[i].minimizer.value());
        }
      }
    }
  }

  TEST_CASE("scanner names") {
    CHECK(parse_scanner("scan") == Scanner::simple);
    CHECK(parse_scanner("queue") == Scanner::queue);
    CHECK(parse_scanner("brute") == Scanner::brute);
    CHECK(parse_scanner(to_string(Scanner::queue)) == Scanner::queue);
    CHECK_THROWS(parse_scanner("heap"));
  }
}

TEST_SUITE("partitioning") {
  TEST_CASE("wrap hash spreads minimizers evenly") {
    for (std::uint32_t t : {16u, 256u, 1000u}) {
      std::vector<std::uint64_t> counts(t);
      const std::uint64_t words = std::uint64_t{1} << 20;  // all 10-mers
      for (std::uint64_t v = 0; v < words; ++v) ++counts[wrap_hash(v, t)];
      const double mean = static_cast<double>(words) / t;
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      CHECK(static_cast<double>(*hi) / mean < 1.5);
      CHECK(static_cast<double>(*lo) / mean > 0.5);
    }
    CHECK(wrap_hash(pack("ACGTAC"), 97) == wrap_hash(pack("ACGTAC").value(), 97));
    CHECK(partition_of(14, 64, WrapMode::identity) == 14);
    CHECK(partition_of(70, 64, WrapMode::identity) == 6);
  }

  TEST_CASE("two-read fixture scatters by minimizer") {
    const auto dir = oracle::temp_dir("scatter");
    auto reads = VectorReadStream::from_strings({"GTAATGAC", "GTAATGAC"});
    PartitionConfig cfg;
    cfg.k = 5;
    cfg.p = 3;
    cfg.t = 64;
    cfg.rc_mode = false;
    cfg.wrap = WrapMode::identity;
    cfg.work_dir = dir;
    const auto result = msp_partition(reads, cfg);
    CHECK(result.total_kmers == 8);
    CHECK(result.breaks == 2);
    const auto aat = read_partition_file(partition_path(dir, 3));
    const auto atg = read_partition_file(partition_path(dir, 14));
    REQUIRE(aat.size() == 2);
    REQUIRE(atg.size() == 2);
    CHECK(aat[0] == PartitionRecord{1, pack("GTAATGA")});
    CHECK(aat[1] == PartitionRecord{5, pack("GTAATGA")});
    CHECK(atg[0] == PartitionRecord{4, pack("ATGAC")});
    CHECK(atg[1] == PartitionRecord{8, pack("ATGAC")});
    CHECK(result.partitions[3].kmers == 6);
    CHECK(result.partitions[14].kmers == 2);
    CHECK(result.partition_bases() == 24);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("every ordinal lands once, in the partition of its minimizer") {
    const auto dir = oracle::temp_dir("locality");
    std::mt19937_64 rng(31);
    std::vector<std::string> strings;
    for (int i = 0; i < 300; ++i) strings.push_back(oracle::random_dna(10 + rng() % 120, rng));
    for (bool rc : {false, true}) {
      for (unsigned threads : {1u, 3u}) {
        auto reads = VectorReadStream::from_strings(strings);
        PartitionConfig cfg;
        cfg.k = 21;
        cfg.p = 6;
        cfg.t = 37;
        cfg.rc_mode = rc;
        cfg.threads = threads;
        cfg.work_dir = dir;
        const auto result = msp_partition(reads, cfg);

        std::map<std::uint64_t, std::string> kmer_at;  // ordinal -> k-mer
        std::uint64_t ordinal = 1;
        std::uint64_t skipped = 0;
        for (const auto& s : strings) {
          if (s.size() < cfg.k) {
            ++skipped;
            continue;
          }
          for (std::size_t j = 0; j + cfg.k <= s.size(); ++j) kmer_at[ordinal++] = s.substr(j, cfg.k);
        }
        CHECK(result.skipped_reads == skipped);
        CHECK(result.total_kmers == kmer_at.size());

        std::vector<int> seen(kmer_at.size() + 1, 0);
        std::uint64_t bases = 0;
        for (std::uint32_t i = 0; i < cfg.t; ++i) {
          std::uint64_t last = 0;
          for (const auto& rec : read_partition_file(partition_path(dir, i))) {
            CHECK(rec.start_ordinal > last);
            last = rec.start_ordinal;
            bases += rec.sequence.size();
            const std::string seq = rec.sequence.to_string();
            for (std::size_t j = 0; j + cfg.k <= seq.size(); ++j) {
              const std::uint64_t o = rec.start_ordinal + j;
              REQUIRE(kmer_at.count(o) == 1);
              CHECK(kmer_at[o] == seq.substr(j, cfg.k));
              ++seen[o];
              const auto mz = oracle::minimizer(kmer_at[o], cfg.p, rc);
              CHECK(partition_of(pack(mz).value(), cfg.t, cfg.wrap) == i);
            }
          }
        }
        CHECK(bases == result.partition_bases());
        for (std::uint64_t o = 1; o < seen.size(); ++o) REQUIRE(seen[o] == 1);
      }
    }
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("partition file records round trip") {
    const auto dir = oracle::temp_dir("records");
    std::mt19937_64 rng(2);
    std::vector<PartitionRecord> expected;
    {
      PartitionWriter w(dir / "p.msp", 0);
      std::uint64_t ordinal = 1;
      for (int i = 0; i < 500; ++i) {
        const auto read = pack(oracle::random_dna(1 + rng() % 300, rng));
        const std::size_t pos = rng() % read.size();
        const std::size_t len = 1 + rng() % (read.size() - pos);
        w.append(ordinal, read, pos, len);
        expected.push_back({ordinal, read.subsequence(pos, len)});
        ordinal += 1 + rng() % 10;
      }
      w.close();
    }
    CHECK(read_partition_file(dir / "p.msp") == expected);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("config validation") {
    PartitionConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.p = 60;
    CHECK_THROWS(cfg.validate());
    cfg.p = 12;
    cfg.t = 0;
    CHECK_THROWS(cfg.validate());
    cfg.t = 1;
    cfg.k = 129;
    CHECK_THROWS(cfg.validate());
  }
}
