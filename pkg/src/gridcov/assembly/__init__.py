"""Gluing labeled patrol regions and expanded permutahedra into the covering complex."""
from .build import (
    DEFAULT_MAX_CELLS, CoveringComplex, Layout, Mode, Multiplicities, build_covering_complex,
    decode_label, default_threads,
)
from .counts import (
    Comparison, CountReport, compare_counts, predicted_cell_counts, predicted_euler,
)
from .labels import (
    GluingContext, HalfEdge, Labeling, OverlapVertex, PermVertex, QCube, QEdge, QSquare,
    SwarmEdge, Triangle, canonical_label, enumerate_labelings, rank_permutation,
    unrank_permutation,
)
from .reference import build_reference

__all__ = [
    "DEFAULT_MAX_CELLS", "CoveringComplex", "Layout", "Mode", "Multiplicities",
    "build_covering_complex", "decode_label", "default_threads", "Comparison", "CountReport",
    "compare_counts", "predicted_cell_counts", "predicted_euler", "GluingContext", "HalfEdge",
    "Labeling", "OverlapVertex", "PermVertex", "QCube", "QEdge", "QSquare", "SwarmEdge",
    "Triangle", "canonical_label", "enumerate_labelings", "rank_permutation",
    "unrank_permutation", "build_reference",
]
