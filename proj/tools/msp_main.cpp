// msp: build de Bruijn graphs from short reads with minimum substring
// partitioning, run the baselines, and evaluate the random-string model.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "msp/analysis.hpp"
#include "msp/fastx.hpp"
#include "msp/pipeline.hpp"

namespace {

struct InputOptions {
  std::vector<std::string> files;
  std::uint64_t random_reads = 0;
  std::size_t read_length = 100;
  std::size_t genome = 0;
  bool keep_n = false;
};

struct CommonOptions {
  unsigned k = 59;
  unsigned p = 12;
  std::uint32_t t = 1000;
  bool rc = true;
  std::string scanner = "scan";
  std::string wrap = "hash";
  std::string work_dir = "msp-work";
  double mem_gib = 4.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool dense = false;

  std::uint64_t mem_bytes() const { return static_cast<std::uint64_t>(mem_gib * double(std::uint64_t{1} << 30)); }
};

void add_inputs(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("inputs", in.files, "FASTA/FASTQ files, optionally gzip-compressed")->check(CLI::ExistingFile);
  cmd->add_option("--random-reads", in.random_reads, "Generate this many synthetic reads instead of reading files");
  cmd->add_option("--read-length", in.read_length, "Length of synthetic reads")->capture_default_str();
  cmd->add_option("--genome", in.genome,
                  "Sample synthetic reads from a random genome of this length (0 = independent uniform reads)");
  cmd->add_flag("--no-split-n", in.keep_n, "Reject reads with non-ACGT characters instead of splitting them");
}

void add_k(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-k", o.k, "k-mer length")->capture_default_str()->check(CLI::Range(1, 128));
}

void add_rc(CLI::App* cmd, CommonOptions& o) {
  cmd->add_flag("--rc,!--no-rc", o.rc, "Treat a k-mer and its reverse complement as one vertex")->capture_default_str();
}

void add_partition_options(CLI::App* cmd, CommonOptions& o) {
  add_k(cmd, o);
  cmd->add_option("-p", o.p, "Minimum substring length")->capture_default_str()->check(CLI::Range(1, 32));
  cmd->add_option("-t", o.t, "Number of wrapped partitions")->capture_default_str()->check(CLI::PositiveNumber);
  add_rc(cmd, o);
  cmd->add_option("--scanner", o.scanner, "Minimizer scanner")->check(CLI::IsMember({"scan", "queue", "brute"}))
      ->capture_default_str();
  cmd->add_option("--wrap", o.wrap, "Minimizer to partition folding")->check(CLI::IsMember({"hash", "identity"}))
      ->capture_default_str();
}

void add_run_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--workdir", o.work_dir, "Work directory")->capture_default_str();
  cmd->add_option("--mem", o.mem_gib, "Memory budget in GiB")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Seed for synthetic inputs and Monte Carlo")->capture_default_str();
}

std::unique_ptr<msp::ReadStream> open_reads(const InputOptions& in, const CommonOptions& o) {
  if (in.random_reads > 0) {
    if (!in.files.empty()) throw CLI::ValidationError("inputs", "give input files or --random-reads, not both");
    if (in.genome > 0) {
      return std::make_unique<msp::GenomeSampleStream>(in.genome, in.random_reads, in.read_length, in.read_length, o.seed);
    }
    return std::make_unique<msp::RandomReadStream>(in.random_reads, in.read_length, o.seed);
  }
  if (in.files.empty()) throw CLI::ValidationError("inputs", "no input files (or use --random-reads)");
  std::vector<std::filesystem::path> paths(in.files.begin(), in.files.end());
  return std::make_unique<msp::FastxReadStream>(paths, o.k, !in.keep_n);
}

void report_ingest(const msp::ReadStream& reads) {
  if (const auto* f = dynamic_cast<const msp::FastxReadStream*>(&reads)) {
    const auto& s = f->stats();
    std::cerr << "ingest: " << s.records << " records, " << s.reads << " reads, " << s.split_records
              << " records split at non-ACGT bases, " << s.short_dropped << " runs shorter than k dropped\n";
  }
}

msp::BuildOptions build_options(const CommonOptions& o) {
  msp::BuildOptions b;
  auto& c = b.partition;
  c.k = o.k;
  c.p = o.p;
  c.t = o.t;
  c.rc_mode = o.rc;
  c.scanner = msp::parse_scanner(o.scanner);
  c.wrap = msp::parse_wrap_mode(o.wrap);
  c.work_dir = o.work_dir;
  c.memory_budget = o.mem_bytes();
  c.threads = o.threads;
  b.seed = o.seed;
  b.dense = o.dense;
  return b;
}

void print_summary(const msp::Manifest& m) {
  static const char* keys[] = {"last_completed_phase", "reads", "N", "V", "partition_bytes", "map.replacement_ranges",
                               "map.peak_table_entries", "edges.count"};
  for (const char* key : keys) {
    if (m.has(key)) std::cout << key << '=' << m.get(key) << '\n';
  }
}

/// Opens --out or falls back to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

msp::SymbolDistribution parse_distribution(const std::vector<double>& v) {
  if (v.empty()) return {};
  if (v.size() != 4) throw CLI::ValidationError("--dist", "expects four probabilities");
  return msp::SymbolDistribution({v[0], v[1], v[2], v[3]});
}

msp::Word parse_word(const std::string& text) {
  msp::Word w;
  for (char c : text) {
    if (c >= '0' && c <= '3') {
      w.push_back(static_cast<std::uint8_t>(c - '0'));
    } else {
      const auto code = msp::encode_base(c);
      if (code > 3) throw CLI::ValidationError("--word", "symbols must be 0-3 or A/C/G/T");
      w.push_back(code);
    }
  }
  return w;
}

std::string word_string(const msp::Word& w) {
  std::string s;
  for (auto c : w) s.push_back(msp::decode_base(c));
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum substring partitioning de Bruijn graph toolkit"};
  app.require_subcommand(1);
  InputOptions in;
  CommonOptions o;

  auto* build_cmd = app.add_subcommand("build", "Run partition, map, merge and edges");
  add_inputs(build_cmd, in);
  add_partition_options(build_cmd, o);
  add_run_options(build_cmd, o);
  build_cmd->add_flag("--dense", o.dense, "Renumber vertex ids to 1..V");

  auto* partition_cmd = app.add_subcommand("partition", "Scatter super k-mers into partition files");
  add_inputs(partition_cmd, in);
  add_partition_options(partition_cmd, o);
  add_run_options(partition_cmd, o);

  auto* map_cmd = app.add_subcommand("map", "Map each partition and write replacement files");
  add_run_options(map_cmd, o);
  auto* merge_cmd = app.add_subcommand("merge", "Merge replacement files into the id stream");
  merge_cmd->add_option("--workdir", o.work_dir, "Work directory")->capture_default_str();
  auto* edges_cmd = app.add_subcommand("edges", "Write the weighted edge list");
  add_run_options(edges_cmd, o);
  edges_cmd->add_flag("--dense", o.dense, "Renumber vertex ids to 1..V");

  std::string baseline_mode;
  unsigned suffix = 0;
  auto* baseline_cmd = app.add_subcommand("baseline", "Run H-Partition or B-Partition");
  baseline_cmd->add_option("mode", baseline_mode, "h or b")->required()->check(CLI::IsMember({"h", "b"}));
  add_inputs(baseline_cmd, in);
  add_k(baseline_cmd, o);
  baseline_cmd->add_option("-t", o.t, "Number of partitions")->capture_default_str()->check(CLI::PositiveNumber);
  add_rc(baseline_cmd, o);
  add_run_options(baseline_cmd, o);
  baseline_cmd->add_option("--suffix", suffix, "B-Partition: bucket on the last N bases (0 = whole k-mer)");

  auto* verify_cmd = app.add_subcommand("verify", "Compare a built graph with the in-memory reference");
  add_inputs(verify_cmd, in);
  verify_cmd->add_option("--workdir", o.work_dir, "Work directory")->capture_default_str();
  verify_cmd->add_option("--seed", o.seed, "Seed used for synthetic inputs")->capture_default_str();

  auto* analyze = app.add_subcommand("analyze", "Random-string model; CSV to stdout or --out");
  analyze->require_subcommand(1);
  std::string out_path;
  std::vector<unsigned> ms{60, 100, 150}, ks{31}, ps{8};
  std::uint64_t trials = 100000;
  std::vector<double> dist;
  std::string word_text;
  std::size_t n = 0;
  unsigned a = 3;
  bool monte_carlo = false;
  bool full_table = false;
  unsigned k_min = 0, k_max = 0;

  auto add_analysis_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "Write CSV here instead of stdout");
    cmd->add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  };
  auto* breaks_cmd = analyze->add_subcommand(
      "breaks", "Mean breaks per read. Columns: m,k,p,trials,mean_breaks,stderr,breaks_per_window,bound");
  breaks_cmd->add_option("-m", ms, "Read lengths")->delimiter(',')->capture_default_str();
  breaks_cmd->add_option("-k", ks, "k values")->delimiter(',')->capture_default_str();
  breaks_cmd->add_option("-p", ps, "p values")->delimiter(',')->capture_default_str();
  breaks_cmd->add_option("--trials", trials, "Reads per point")->capture_default_str();
  add_analysis_common(breaks_cmd);

  auto* capacity_cmd = analyze->add_subcommand(
      "capacity", "Per-word share of k-mers, sorted descending. Columns: rank,word,fraction");
  capacity_cmd->add_option("-k", o.k, "k-mer length")->capture_default_str();
  capacity_cmd->add_option("-p", o.p, "Minimum substring length")->capture_default_str();
  capacity_cmd->add_option("--dist", dist, "Symbol probabilities p0,p1,p2,p3")->delimiter(',');
  capacity_cmd->add_flag("--monte-carlo", monte_carlo, "Allow sampling when p > 8");
  capacity_cmd->add_option("--trials", trials, "Samples for Monte Carlo")->capture_default_str();
  add_analysis_common(capacity_cmd);

  auto* alpha_cmd = analyze->add_subcommand(
      "alpha", "Largest-partition share and its bounds. Columns: k,p,alpha,lower_2k,upper_3k");
  alpha_cmd->add_option("-p", ps, "p values")->delimiter(',')->capture_default_str();
  alpha_cmd->add_option("--k-min", k_min, "Smallest k (default p)");
  alpha_cmd->add_option("--k-max", k_max, "Largest k (default 100)");
  add_analysis_common(alpha_cmd);

  auto* minstb_cmd = analyze->add_subcommand(
      "minstb", "Clean probability of a word. Columns: word,n,clean,prob_min_word (or i,j,Q with --table)");
  minstb_cmd->add_option("--word", word_text, "Word as A/C/G/T or 0-3")->required();
  minstb_cmd->add_option("-n", n, "String length")->required();
  minstb_cmd->add_option("--dist", dist, "Symbol probabilities p0,p1,p2,p3")->delimiter(',');
  minstb_cmd->add_flag("--table", full_table, "Print every DP cell");
  add_analysis_common(minstb_cmd);

  auto* p1_cmd = analyze->add_subcommand(
      "p1", "Break probability inequalities. Columns: quantity,k,p,estimate,stderr,bound,holds");
  p1_cmd->add_option("-k", o.k, "k")->capture_default_str();
  p1_cmd->add_option("-p", o.p, "p")->capture_default_str();
  p1_cmd->add_option("-a", a, "Shift a")->capture_default_str();
  p1_cmd->add_option("--trials", trials, "Trials per estimate")->capture_default_str();
  add_analysis_common(p1_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (build_cmd->parsed() || partition_cmd->parsed()) {
      auto reads = open_reads(in, o);
      const auto opts = build_options(o);
      const auto m = build_cmd->parsed() ? msp::build(*reads, opts) : msp::run_partition(*reads, opts);
      report_ingest(*reads);
      print_summary(m);
      if (m.get_u64("reads") > 0) {
        const double n_bases = static_cast<double>(m.get_u64("input_bases"));
        const unsigned mean_len = static_cast<unsigned>(std::lround(n_bases / double(m.get_u64("reads"))));
        if (mean_len >= o.k) {
          const double est = msp::total_size_estimate(n_bases, mean_len, o.k, o.p, 20000, o.seed);
          std::cout << "estimated_partition_bases=" << std::llround(est) << '\n';
        }
      }
    } else if (map_cmd->parsed()) {
      print_summary(msp::run_map(o.work_dir, o.mem_bytes(), o.threads));
    } else if (merge_cmd->parsed()) {
      print_summary(msp::run_merge(o.work_dir));
    } else if (edges_cmd->parsed()) {
      print_summary(msp::run_edges(o.work_dir, o.dense, o.mem_bytes()));
    } else if (baseline_cmd->parsed()) {
      auto reads = open_reads(in, o);
      msp::BaselineConfig cfg;
      cfg.k = o.k;
      cfg.t = o.t;
      cfg.rc_mode = o.rc;
      cfg.work_dir = o.work_dir;
      cfg.memory_budget = o.mem_bytes();
      cfg.suffix_symbols = suffix;
      const auto m = msp::run_baseline(*reads, baseline_mode == "h" ? msp::BaselineMode::h : msp::BaselineMode::b, cfg);
      report_ingest(*reads);
      for (const auto& [key, value] : m.values()) std::cout << key << '=' << value << '\n';
    } else if (verify_cmd->parsed()) {
      const auto m = msp::load_manifest(o.work_dir, msp::Phase::edges);
      o.k = static_cast<unsigned>(m.get_u64("k"));
      auto reads = open_reads(in, o);
      const auto r = msp::verify(*reads, o.work_dir);
      std::cout << (r.ok ? "OK" : "MISMATCH") << ": " << r.detail << " (vertices " << r.vertices << " vs "
                << r.reference_vertices << ", edges " << r.edges << " vs " << r.reference_edges << ")\n";
      return r.ok ? 0 : 1;
    } else if (breaks_cmd->parsed()) {
      Output out(out_path);
      auto& os = out.stream();
      os << "m,k,p,trials,mean_breaks,stderr,breaks_per_window,bound\n";
      for (unsigned m : ms) {
        for (unsigned k : ks) {
          for (unsigned p : ps) {
            if (p > k || k > m) continue;
            const auto e = msp::simulate_breaks(m, k, p, trials, o.seed, o.threads);
            const double per = m > k ? e.mean / (m - k) : 0.0;
            os << m << ',' << k << ',' << p << ',' << trials << ',' << e.mean << ',' << e.std_error << ',' << per
               << ',' << (p + 1.0) / (k + 1.0) << '\n';
          }
        }
      }
    } else if (capacity_cmd->parsed()) {
      Output out(out_path);
      auto& os = out.stream();
      const auto c = msp::capacity_distribution(o.k, o.p, parse_distribution(dist), monte_carlo, trials, o.seed);
      std::vector<std::uint64_t> order(c.fraction.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return c.fraction[x] > c.fraction[y]; });
      os << "rank,word,fraction\n";
      for (std::size_t r = 0; r < order.size(); ++r) {
        os << r + 1 << ',' << word_string(msp::word_from_value(order[r], o.p)) << ',' << c.fraction[order[r]] << '\n';
      }
    } else if (alpha_cmd->parsed()) {
      Output out(out_path);
      auto& os = out.stream();
      os << "k,p,alpha,lower_2k,upper_3k\n";
      for (unsigned p : ps) {
        const unsigned lo = k_min ? k_min : p;
        const unsigned hi = k_max ? k_max : 100;
        for (unsigned k = std::max(lo, p); k <= hi; ++k) {
          const double scale = std::pow(4.0, p + 1.0);
          os << k << ',' << p << ',' << msp::alpha(k, p) << ',' << 2.0 * k / scale << ',' << 3.0 * k / scale << '\n';
        }
      }
    } else if (minstb_cmd->parsed()) {
      Output out(out_path);
      auto& os = out.stream();
      const auto w = parse_word(word_text);
      const auto d = parse_distribution(dist);
      const auto table = msp::minstb(w, n, d);
      os.precision(17);
      if (full_table) {
        os << "i,j,Q\n";
        for (std::size_t i = 0; i <= n; ++i) {
          for (std::size_t j = 0; j < w.size(); ++j) os << i << ',' << j << ',' << table.at(i, j) << '\n';
        }
      } else {
        os << "word,n,clean,prob_min_word\n";
        os << word_string(w) << ',' << n << ',' << table.clean() << ',' << msp::prob_min_word(w, n, d) << '\n';
      }
    } else if (p1_cmd->parsed()) {
      Output out(out_path);
      auto& os = out.stream();
      const auto r = msp::p1_inequalities(o.k, o.p, a, trials, o.seed);
      os << "quantity,k,p,estimate,stderr,bound,holds\n";
      os << "P1," << r.k << ',' << r.p << ',' << r.base.mean << ',' << r.base.std_error << ',' << r.break_bound << ','
         << (r.bound_holds ? "true" : "false") << '\n';
      os << "P1_shifted," << r.k + r.a << ',' << r.p + r.a << ',' << r.shifted.mean << ',' << r.shifted.std_error
         << ',' << r.rhs << ',' << (r.shift_holds ? "true" : "false") << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "msp: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
