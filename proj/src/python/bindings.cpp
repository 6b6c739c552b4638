#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "msp/analysis.hpp"
#include "msp/map_merge.hpp"
#include "msp/minimizer.hpp"
#include "msp/pipeline.hpp"
#include "msp/sequence.hpp"

namespace py = pybind11;
using namespace msp;

namespace {

Word parse_word(const std::string& word) {
  Word w;
  for (Code c : pack(word).codes()) w.push_back(c);
  return w;
}

SymbolDistribution make_dist(const std::optional<std::array<double, 4>>& p) {
  return p ? SymbolDistribution(*p) : SymbolDistribution{};
}

py::dict to_dict(const Manifest& m) {
  py::dict d;
  for (const auto& [key, value] : m.values()) d[py::str(key)] = value;
  return d;
}

py::tuple graph_tuple(const DeBruijnGraph& g) {
  std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> edges;
  edges.reserve(g.edges.size());
  for (const auto& e : g.edges) edges.emplace_back(e.u, e.v, e.weight);
  return py::make_tuple(g.vertices, edges);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Minimizer-partitioned de Bruijn graph construction";

  m.def("reverse_complement", [](const std::string& s) { return reverse_complement(pack(s)).to_string(); });
  m.def("canonical", [](const std::string& s) { return canonical_kmer(pack(s)).to_string(); });

  m.def(
      "minimizer",
      [](const std::string& window, unsigned p, bool rc) {
        const auto r = rc ? min_p_rc(pack(window), p) : min_p_bruteforce(pack(window), p);
        return py::make_tuple(r.substring.to_string(), r.position, r.strand == Strand::reverse);
      },
      py::arg("window"), py::arg("p"), py::arg("rc") = false,
      "(substring, position, on_reverse_strand) of the smallest p-substring.");

  m.def(
      "super_kmers",
      [](const std::string& read, unsigned k, unsigned p, bool rc, const std::string& scanner) {
        const auto r = scan_read(parse_scanner(scanner), pack(read), k, p, {rc, 1});
        std::vector<std::tuple<std::uint64_t, std::string, std::string>> out;
        for (const auto& s : r.super_kmers) out.emplace_back(s.start_ordinal, s.sequence.to_string(), s.minimizer.to_string());
        return py::make_tuple(out, r.stats.comparisons);
      },
      py::arg("read"), py::arg("k"), py::arg("p"), py::arg("rc") = false, py::arg("scanner") = "scan",
      "([(start_ordinal, sequence, minimizer)], comparisons)");

  m.def(
      "build",
      [](const std::vector<std::string>& reads, const std::filesystem::path& work_dir, unsigned k, unsigned p,
         std::uint32_t t, bool rc, const std::string& wrap, bool dense, unsigned threads) {
        auto stream = VectorReadStream::from_strings(reads);
        BuildOptions opts;
        opts.partition.k = k;
        opts.partition.p = p;
        opts.partition.t = t;
        opts.partition.rc_mode = rc;
        opts.partition.wrap = parse_wrap_mode(wrap);
        opts.partition.work_dir = work_dir;
        opts.partition.threads = threads;
        opts.dense = dense;
        py::gil_scoped_release release;
        const auto manifest = build(stream, opts);
        py::gil_scoped_acquire acquire;
        return to_dict(manifest);
      },
      py::arg("reads"), py::arg("work_dir"), py::arg("k") = 31, py::arg("p") = 8, py::arg("t") = 64,
      py::arg("rc") = true, py::arg("wrap") = "hash", py::arg("dense") = false, py::arg("threads") = 1,
      "Runs all phases and returns the manifest.");

  m.def(
      "load_graph", [](const std::filesystem::path& work_dir) { return graph_tuple(load_graph(work_dir)); },
      py::arg("work_dir"), "(vertices, [(u, v, weight)]) of a completed build.");

  m.def(
      "reference_graph",
      [](const std::vector<std::string>& reads, unsigned k, bool rc) {
        auto stream = VectorReadStream::from_strings(reads);
        return graph_tuple(reference_build(stream, k, rc).graph);
      },
      py::arg("reads"), py::arg("k"), py::arg("rc") = true);

  m.def(
      "baseline",
      [](const std::vector<std::string>& reads, const std::string& mode, const std::filesystem::path& work_dir,
         unsigned k, std::uint32_t t, bool rc) {
        auto stream = VectorReadStream::from_strings(reads);
        BaselineConfig cfg;
        cfg.k = k;
        cfg.t = t;
        cfg.rc_mode = rc;
        cfg.work_dir = work_dir;
        if (mode != "h" && mode != "b") throw std::invalid_argument("mode must be 'h' or 'b'");
        const auto manifest = run_baseline(stream, mode == "h" ? BaselineMode::h : BaselineMode::b, cfg);
        return py::make_tuple(to_dict(manifest), read_id_stream(work_dir / manifest.get("id_stream")));
      },
      py::arg("reads"), py::arg("mode"), py::arg("work_dir"), py::arg("k") = 31, py::arg("t") = 64,
      py::arg("rc") = true, "(manifest, id stream)");

  m.def(
      "clean_probability",
      [](const std::string& word, std::size_t n, std::optional<std::array<double, 4>> dist) {
        return minstb(parse_word(word), n, make_dist(dist)).clean();
      },
      py::arg("word"), py::arg("n"), py::arg("dist") = py::none(),
      "Probability that no substring of a random n-string is <= word.");

  m.def(
      "prob_min_word",
      [](const std::string& word, std::size_t n, std::optional<std::array<double, 4>> dist) {
        return prob_min_word(parse_word(word), n, make_dist(dist));
      },
      py::arg("word"), py::arg("n"), py::arg("dist") = py::none());

  m.def("alpha", &alpha, py::arg("k"), py::arg("p"));

  m.def(
      "simulate_breaks",
      [](unsigned m_len, unsigned k, unsigned p, std::uint64_t trials, std::uint64_t seed, bool rc) {
        py::gil_scoped_release release;
        const auto e = simulate_breaks(m_len, k, p, trials, seed, 1, rc);
        return std::make_tuple(e.mean, e.std_error);
      },
      py::arg("m"), py::arg("k"), py::arg("p"), py::arg("trials") = 10000, py::arg("seed") = 1, py::arg("rc") = false,
      "(mean breaks per read, standard error)");
}
