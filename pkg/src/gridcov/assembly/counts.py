"""Closed-form cell counts and Euler characteristic of the covering complex."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Optional

from ..errors import DimensionUnsupported, DomainTooSmall
from ..griddomain import CrossingSet, DomainSummary, PatrolRegion


def falling(n: int, k: int) -> int:
    """P(n, k) = n! / (n-k)!"""
    return factorial(n) // factorial(n - k)


@dataclass
class CountReport:
    overlap_vertices: int
    perm_vertices: int
    q_edges: int
    half_edges: int
    swarm_edges: int
    squares: int
    triangles: int
    cubes: int = 0
    source: str = "predicted"
    notes: dict = field(default_factory=dict)

    @property
    def vertices(self) -> int:
        return self.overlap_vertices + self.perm_vertices

    @property
    def edges(self) -> int:
        return self.q_edges + self.half_edges + self.swarm_edges

    @property
    def faces(self) -> int:
        return self.squares + self.triangles

    @property
    def euler(self) -> int:
        return self.vertices - self.edges + self.faces - self.cubes

    @property
    def total_cells(self) -> int:
        return self.vertices + self.edges + self.faces + self.cubes

    def classes(self) -> dict:
        return {
            "v": self.vertices,
            "v_overlap": self.overlap_vertices,
            "v_perm": self.perm_vertices,
            "e": self.edges,
            "e_q": self.q_edges,
            "e_half": self.half_edges,
            "e_swarm": self.swarm_edges,
            "sigma_s": self.squares,
            "sigma_t": self.triangles,
            "cubes": self.cubes,
        }

    def to_dict(self) -> dict:
        out = {"source": self.source, "counts": self.classes(), "euler": self.euler}
        if self.notes:
            out["notes"] = self.notes
        return out


def predicted_cell_counts(s: DomainSummary, c: CrossingSet, q: PatrolRegion) -> CountReport:
    """Cell counts per class from the crossing histogram and K (2D only).

    The Q-edge count uses sum_i n_i (i-1) (A+1)!; the printed variant
    sum_i (n_i - 1)(A+1)! is kept in ``notes`` for comparison.
    """
    if s.dim != 2:
        raise DimensionUnsupported("closed-form class counts are 2D only")
    A = s.A
    if A < 2:
        raise DomainTooSmall("need at least 2 plaques")
    full = factorial(A + 1)
    hist = {i: n for i, n in c.histogram().items() if i >= 2}
    per_copy = {i: falling(A + 1, A - i) * n * factorial(i + 1) for i, n in hist.items()}
    squares = full * q.K
    triangles = sum(per_copy[i] * (i * (i - 1) // 2) for i in hist)
    q_edges = sum(n * (i - 1) for i, n in hist.items()) * full
    half = sum(per_copy[i] * i for i in hist)
    swarm = sum(per_copy[i] * (i * (i - 1) // 2 - (i - 1)) for i in hist)
    overlap = A * full // 2
    perm = sum(per_copy.values())
    printed = sum(n - 1 for n in hist.values()) * full
    return CountReport(
        overlap, perm, q_edges, half, swarm, squares, triangles, 0, "predicted",
        notes={
            "q_edges_printed_formula": printed,
            "q_edges_printed_residual": printed - q_edges,
        },
    )


def predicted_euler(s: DomainSummary) -> int:
    """(chi(G_A) - A/2) (A+1)!, exactly. A theorem in 2D, a conjecture in 3D."""
    if s.A < 2:
        raise DomainTooSmall("need at least 2 plaques")
    return (2 * s.euler - s.A) * factorial(s.A + 1) // 2


@dataclass
class Comparison:
    residuals: dict
    euler_only: bool
    conjecture: bool

    @property
    def passed(self) -> bool:
        return all(v == 0 for v in self.residuals.values())

    def to_dict(self) -> dict:
        return {
            "residuals": self.residuals,
            "pass": self.passed,
            "euler_only": self.euler_only,
            "conjecture": self.conjecture,
        }


def compare_counts(built: CountReport, predicted: Optional[CountReport],
                   predicted_chi: int, dim: int = 2) -> Comparison:
    """Residuals built - predicted per class (2D) or for the Euler characteristic only (3D)."""
    residuals = {"euler": built.euler - predicted_chi}
    if dim == 2 and predicted is not None:
        b, p = built.classes(), predicted.classes()
        for key in b:
            residuals[key] = b[key] - p[key]
    return Comparison(residuals, euler_only=dim != 2, conjecture=dim != 2)


def expansion_counts_per_vertex(i: int) -> dict:
    """Cells carried by one permutahedron vertex of a length-i crossing."""
    pairs = comb(i, 2)
    return {"half": i, "single": max(i - 1, 0), "swarm": pairs - max(i - 1, 0), "triangles": pairs}
