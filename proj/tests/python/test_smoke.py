import itertools
import random

import pytest

import mspgraph


def random_reads(count, genome_len, seed):
    rng = random.Random(seed)
    genome = "".join(rng.choice("ACGT") for _ in range(genome_len))
    reads = []
    for _ in range(count):
        n = rng.randint(20, 80)
        pos = rng.randrange(genome_len - n)
        r = genome[pos : pos + n]
        reads.append(mspgraph.reverse_complement(r) if rng.random() < 0.5 else r)
    return reads


def test_sequence_helpers():
    assert mspgraph.reverse_complement("GTAAT") == "ATTAC"
    assert mspgraph.canonical("TTTT") == "AAAA"
    assert mspgraph.minimizer("GTAAT", 3) == ("AAT", 2, False)
    assert mspgraph.minimizer("TTTC", 2, rc=True)[0] == "AA"


def test_fixture_super_kmers():
    supers, comparisons = mspgraph.super_kmers("GTAATGAC", 5, 3)
    assert supers == [(1, "GTAATGA", "AAT"), (4, "ATGAC", "ATG")]
    assert comparisons > 0
    for scanner in ("queue", "brute"):
        assert mspgraph.super_kmers("GTAATGAC", 5, 3, scanner=scanner)[0] == supers


@pytest.mark.parametrize("rc", [False, True])
def test_build_matches_reference(tmp_path, rc):
    reads = random_reads(300, 2000, 1)
    manifest = mspgraph.build(reads, tmp_path, k=15, p=5, t=16, rc=rc)
    assert manifest["last_completed_phase"] == "edges"
    assert mspgraph.load_graph(tmp_path) == mspgraph.reference_graph(reads, 15, rc)
    assert int(manifest["V"]) == len(mspgraph.reference_graph(reads, 15, rc)[0])


def test_baselines_agree(tmp_path):
    reads = random_reads(200, 1500, 2)
    _, h_ids = mspgraph.baseline(reads, "h", tmp_path, k=13, t=8)
    _, b_ids = mspgraph.baseline(reads, "b", tmp_path, k=13, t=8)

    def classes(ids):
        first = {}
        return [first.setdefault(x, i) for i, x in enumerate(ids)]

    assert classes(h_ids) == classes(b_ids)
    with pytest.raises(ValueError):
        mspgraph.baseline(reads, "x", tmp_path)


def test_minstb_against_enumeration():
    dist = [0.4, 0.1, 0.2, 0.3]
    word, n = "AC", 5
    clean = 0.0
    for s in itertools.product(range(4), repeat=n):
        if all(list(s[i : i + 2]) > [0, 1] for i in range(n - 1)):
            prob = 1.0
            for c in s:
                prob *= dist[c]
            clean += prob
    assert abs(mspgraph.clean_probability(word, n, dist) - clean) < 1e-12
    total = sum(mspgraph.prob_min_word("".join(w), 6) for w in itertools.product("ACGT", repeat=2))
    assert abs(total - 1.0) < 1e-9


def test_alpha_and_breaks():
    assert mspgraph.alpha(5, 5) == 1 / 1024
    mean, se = mspgraph.simulate_breaks(100, 31, 8, trials=5000)
    assert 0 < mean / 69 <= 9 / 32
    assert se > 0


def test_bad_input_raises():
    with pytest.raises(ValueError):
        mspgraph.reverse_complement("ACGN")
