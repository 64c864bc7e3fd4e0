"""Permutahedron skeleta, their face lattices and the shift expansion.

Transposition positions are 1-based: position ``k`` swaps the entries at
positions ``k`` and ``k + 1`` of a permutation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from math import comb, factorial
from typing import Sequence

from .cellcomplex import CellComplex, Kind
from .errors import SamePosition


class Shift(Enum):
    SINGLE = "Single"
    SWARM = "Swarm"


def classify_shift(v: Sequence, positions: tuple) -> Shift:
    """Single shift iff the two transposition positions are neighbours."""
    k, l = positions
    m = len(v)
    for p in (k, l):
        if not 1 <= p <= m - 1:
            raise ValueError(f"position {p} is not a transposition index for order {m}")
    if k == l:
        raise SamePosition(f"positions coincide ({k})")
    return Shift.SINGLE if abs(k - l) == 1 else Shift.SWARM


def transpose(perm: tuple, position: int) -> tuple:
    p = list(perm)
    p[position - 1], p[position] = p[position], p[position - 1]
    return tuple(p)


@dataclass(frozen=True)
class PermComplex:
    """1-skeleton of the permutahedron on ``labels`` (order m = len(labels))."""

    labels: tuple
    vertices: tuple
    edges: tuple  # (vertex index, vertex index, position)

    @property
    def order(self) -> int:
        return len(self.labels)

    def degree(self, v: int) -> int:
        return sum(1 for a, b, _ in self.edges if v in (a, b))

    def to_complex(self) -> CellComplex:
        cx = CellComplex()
        ids = [cx.add_cell(0, (), ("perm", v), Kind.PERM_VERTEX) for v in self.vertices]
        for a, b, k in self.edges:
            cx.add_cell(1, (ids[a], ids[b]), ("edge", self.vertices[a], k), Kind.OTHER)
        return cx.seal()


def skel1(m: int, labels: Sequence = None) -> PermComplex:
    """The 1-skeleton of the permutahedron whose vertices are permutations of m labels."""
    if m < 1:
        raise ValueError("order must be >= 1")
    labels = tuple(labels) if labels is not None else tuple(range(1, m + 1))
    if len(labels) != m:
        raise ValueError("label count differs from order")
    vertices = tuple(itertools.permutations(labels))
    index = {v: i for i, v in enumerate(vertices)}
    edges = []
    for i, v in enumerate(vertices):
        for k in range(1, m):
            if v[k - 1] < v[k]:  # each edge once, from its lexicographically smaller end
                edges.append((i, index[transpose(v, k)], k))
    edges.sort()
    return PermComplex(labels, vertices, tuple(edges))


# -- face lattice --------------------------------------------------------------


def ordered_set_partitions(labels: Sequence, blocks: int):
    """Ordered partitions of ``labels`` into exactly ``blocks`` nonempty blocks."""
    labels = tuple(labels)
    n = len(labels)
    if blocks == 0:
        if n == 0:
            yield ()
        return
    for assignment in itertools.product(range(blocks), repeat=n):
        if len(set(assignment)) != blocks:
            continue
        yield tuple(
            tuple(lab for lab, b in zip(labels, assignment) if b == j) for j in range(blocks)
        )


def face_facets(face: tuple):
    """Faces one dimension lower: split one block B into an ordered pair (S, B - S)."""
    for j, block in enumerate(face):
        for r in range(1, len(block)):
            for sub in itertools.combinations(block, r):
                rest = tuple(x for x in block if x not in sub)
                yield face[:j] + (sub, rest) + face[j + 1:]


@dataclass(frozen=True)
class FaceLattice:
    order: int
    faces: tuple  # faces[d] = tuple of ordered set partitions into order - d blocks

    def counts(self) -> dict:
        return {d: len(f) for d, f in enumerate(self.faces)}

    def euler(self) -> int:
        return sum((-1) ** d * len(f) for d, f in enumerate(self.faces))

    def to_complex(self) -> CellComplex:
        cx = CellComplex()
        ids = {}
        for d, faces in enumerate(self.faces):
            kind = Kind.PERM_VERTEX if d == 0 else Kind.OTHER
            for face in faces:
                bnd = [ids[f] for f in face_facets(face)] if d else []
                ids[face] = cx.add_cell(d, bnd, ("face", face), kind)
        return cx.seal()


def k_skeleton(m: int, k: int, labels: Sequence = None) -> FaceLattice:
    if not 0 <= k <= m - 1:
        raise ValueError(f"need 0 <= k <= m-1 (m={m}, k={k})")
    labels = tuple(labels) if labels is not None else tuple(range(1, m + 1))
    faces = tuple(
        tuple(sorted(ordered_set_partitions(labels, m - d))) for d in range(k + 1)
    )
    return FaceLattice(m, faces)


def stirling2(n: int, k: int) -> int:
    """Stirling partition number by the standard recurrence."""
    table = [[0] * (k + 1) for _ in range(n + 1)]
    table[0][0] = 1
    for i in range(1, n + 1):
        for j in range(1, min(i, k) + 1):
            table[i][j] = j * table[i - 1][j] + table[i - 1][j - 1]
    return table[n][k]


def face_count(m: int, d: int) -> int:
    return factorial(m - d) * stirling2(m, m - d)


# -- subdivision and expansion ------------------------------------------------------


@dataclass(frozen=True)
class ShiftEdge:
    vertex: int
    positions: tuple  # (k, l), k < l
    kind: Shift


@dataclass(frozen=True)
class ExpandedPerm:
    """Barycentric subdivision of a permutahedron 1-skeleton plus the shift triangles.

    Midpoint ``j`` sits on base edge ``j``; half-edges run midpoint -> endpoint.
    Each shift edge joins the midpoints of two base edges meeting at a vertex and
    bounds exactly one triangle (the shift edge plus the two half-edges there).
    """

    base: PermComplex
    half_edges: tuple  # (base edge index, vertex index)
    shift_edges: tuple
    triangles: tuple  # (shift edge index, half-edge index at k, half-edge index at l)

    @property
    def midpoints(self) -> range:
        return range(len(self.base.edges))

    def counts(self) -> dict:
        single = sum(1 for s in self.shift_edges if s.kind is Shift.SINGLE)
        return {
            "vertices": len(self.base.vertices) + len(self.base.edges),
            "half_edges": len(self.half_edges),
            "shift_edges": len(self.shift_edges),
            "single": single,
            "swarm": len(self.shift_edges) - single,
            "triangles": len(self.triangles),
        }

    def euler(self) -> int:
        c = self.counts()
        return c["vertices"] - c["half_edges"] - c["shift_edges"] + c["triangles"]

    def to_complex(self) -> CellComplex:
        """Standalone complex. Triangle boundaries are ordered (shift, half_k, half_l)."""
        base = self.base
        cx = CellComplex()
        pv = [cx.add_cell(0, (), ("perm", v), Kind.PERM_VERTEX) for v in base.vertices]
        mid = [
            cx.add_cell(0, (), ("mid", base.vertices[a], k), Kind.MIDPOINT)
            for a, _, k in base.edges
        ]
        half = [
            cx.add_cell(1, (mid[e], pv[v]), ("half", e, v), Kind.HALF_EDGE)
            for e, v in self.half_edges
        ]
        shift = []
        for s in self.shift_edges:
            v = base.vertices[s.vertex]
            ends = [self._edge_at(s.vertex, p) for p in s.positions]
            kind = Kind.SINGLE_EDGE if s.kind is Shift.SINGLE else Kind.SWARM_EDGE
            shift.append(
                cx.add_cell(1, (mid[ends[0]], mid[ends[1]]), ("shift", v, s.positions), kind)
            )
        for t, (s, hk, hl) in enumerate(self.triangles):
            sv = self.shift_edges[s]
            cx.add_cell(
                2, (shift[s], half[hk], half[hl]),
                ("tri", base.vertices[sv.vertex], sv.positions), Kind.TRIANGLE,
            )
        return cx.seal()

    def _edge_at(self, vertex: int, position: int) -> int:
        return self._incident[vertex][position]

    @property
    def _incident(self):
        cache = getattr(self, "_incident_cache", None)
        if cache is None:
            cache = [dict() for _ in self.base.vertices]
            for j, (a, b, k) in enumerate(self.base.edges):
                cache[a][k] = j
                cache[b][k] = j
            object.__setattr__(self, "_incident_cache", cache)
        return cache


def subdivide_and_expand(p: PermComplex) -> ExpandedPerm:
    m = p.order
    incident = [dict() for _ in p.vertices]
    for j, (a, b, k) in enumerate(p.edges):
        incident[a][k] = j
        incident[b][k] = j
    half_edges = []
    half_index = {}
    for j, (a, b, _) in enumerate(p.edges):
        for v in (a, b):
            half_index[(j, v)] = len(half_edges)
            half_edges.append((j, v))
    shift_edges = []
    triangles = []
    for v, perm in enumerate(p.vertices):
        for k, l in itertools.combinations(range(1, m), 2):
            kind = classify_shift(perm, (k, l))
            triangles.append(
                (len(shift_edges), half_index[(incident[v][k], v)], half_index[(incident[v][l], v)])
            )
            shift_edges.append(ShiftEdge(v, (k, l), kind))
    return ExpandedPerm(p, tuple(half_edges), tuple(shift_edges), tuple(triangles))


def expected_expansion_counts(m: int) -> dict:
    """Closed-form counts for the expansion of Skel_1 of the order-m permutahedron."""
    n = factorial(m)
    pairs = comb(m - 1, 2)
    single = (m - 2) * n if m >= 2 else 0
    return {
        "vertices": n + n * (m - 1) // 2,
        "half_edges": n * (m - 1),
        "shift_edges": n * pairs,
        "single": single,
        "swarm": n * pairs - single,
        "triangles": n * pairs,
    }
