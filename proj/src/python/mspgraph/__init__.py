"""De Bruijn graph construction with minimizer-based disk partitioning."""

from ._core import (
    alpha,
    baseline,
    build,
    canonical,
    clean_probability,
    load_graph,
    minimizer,
    prob_min_word,
    reference_graph,
    reverse_complement,
    simulate_breaks,
    super_kmers,
)

__all__ = [
    "alpha",
    "baseline",
    "build",
    "canonical",
    "clean_probability",
    "load_graph",
    "minimizer",
    "prob_min_word",
    "reference_graph",
    "reverse_complement",
    "simulate_breaks",
    "super_kmers",
]
