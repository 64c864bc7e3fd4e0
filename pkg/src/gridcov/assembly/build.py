"""Vectorized assembly of the covering complex.

Every cell gets its identifier arithmetically from the lexicographic rank of a
permutation of the N = A+1 agents, so no hashing or global sort is needed and
the result does not depend on how work is split across threads.

Permutations are stored 0-based (agent a is the value a-1). For a labeling the
row is (patroller, agent on cell 0, ..., agent on cell A-1). For a crossing of
length i the row rho lists the arrangement rho[:i+1] followed by the agents on
the off-crossing cells in canonical cell order.

Identifier layout per dimension:
  0: overlap vertices (canonical representative: patroller below the paired agent),
     then N! permutahedron vertices per attached crossing
  1: Q-edges (rank * E + e), then per crossing its half-edges and swarm edges
  2: squares (rank * S + s), then triangles per crossing
  3: cubes (rank * C + k)
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from math import comb, factorial
from typing import Optional, Union

import numpy as np

from ..cellcomplex import CellComplex, Kind
from ..errors import DomainTooSmall, ResourceLimit
from ..griddomain import GridDomain, crossings, patrol_region
from .counts import CountReport
from .labels import (
    HalfEdge, OverlapVertex, PermVertex, QCube, QEdge, QSquare, SwarmEdge, Triangle,
)

DEFAULT_MAX_CELLS = 30_000_000
CHUNK_ROWS = 1 << 16


class Mode(Enum):
    FULL = "full"
    CENSUS = "census"


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("GRIDCOV_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class CrossingBlock:
    """Identifier ranges owned by one attached crossing."""

    xid: int
    cells: tuple
    vertex0: int
    half0: int
    swarm0: int
    triangle0: int

    @property
    def length(self) -> int:
        return len(self.cells)

    @cached_property
    def pairs(self) -> list:
        return list(itertools.combinations(range(1, self.length + 1), 2))

    @cached_property
    def swarm_pairs(self) -> list:
        return [(k, l) for k, l in self.pairs if l > k + 1]

    @property
    def n_swarm(self) -> int:
        return len(self.swarm_pairs)


class Layout:
    """Shared tables for one domain: permutations, ranks, id offsets."""

    def __init__(self, domain: GridDomain, include_degenerate: bool = False):
        if domain.A < 2:
            raise DomainTooSmall(f"need at least 2 plaques, got {domain.A}")
        self.domain = domain
        self.A = A = domain.A
        self.N = N = A + 1
        self.nperm = factorial(N)
        self.patrol = q = patrol_region(domain)
        self.crossing_set = crossings(q)
        self.include_degenerate = include_degenerate
        self.qedges = np.asarray(q.edges, dtype=np.int64).reshape(-1, 2)
        self.E = len(q.edges)
        self.S = len(q.squares)
        self.C = len(q.cubes)
        self.n_overlap = self.nperm * A // 2

        blocks = []
        v = self.n_overlap
        e = self.nperm * self.E
        t = 0
        attached = [
            (xid, x) for xid, x in enumerate(self.crossing_set.crossings)
            if include_degenerate or not x.degenerate
        ]
        for xid, x in attached:
            i = x.length
            b = CrossingBlock(xid, x.cells, v, e, 0, t)
            b.swarm0 = e + self.nperm * i
            blocks.append(b)
            v += self.nperm
            e = b.swarm0 + self.nperm * b.n_swarm
            t += self.nperm * comb(i, 2)
        self.blocks = blocks
        self.nv = v
        self.ne = e
        self.n_squares = self.nperm * self.S
        self.nf = self.n_squares + t
        self.n_cubes = self.nperm * self.C

    # -- permutation tables --

    @cached_property
    def perms(self) -> np.ndarray:
        return np.array(list(itertools.permutations(range(self.N))), dtype=np.uint8)

    @cached_property
    def weights(self) -> np.ndarray:
        return self.N ** np.arange(self.N - 1, -1, -1, dtype=np.int64)

    @cached_property
    def codes(self) -> np.ndarray:
        return self.perms.astype(np.int64) @ self.weights

    def rank(self, rows: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.codes, rows.astype(np.int64) @ self.weights)

    @cached_property
    def canonical(self) -> np.ndarray:
        """Mask over (rank, cell): the labeling is the canonical overlap representative."""
        p = self.perms
        return p[:, :1] < p[:, 1:]

    @cached_property
    def overlap_id(self) -> np.ndarray:
        """Dense overlap-vertex id for each canonical (rank * A + cell) key, else -1."""
        flat = self.canonical.ravel()
        out = np.full(flat.size, -1, dtype=np.int64)
        out[flat] = np.arange(int(flat.sum()))
        return out

    @cached_property
    def overlap_keys(self) -> np.ndarray:
        return np.flatnonzero(self.canonical.ravel())

    @cached_property
    def off_cells(self) -> list:
        out = []
        for b in self.blocks:
            on = set(b.cells)
            out.append(np.array([c for c in range(self.A) if c not in on], dtype=np.int64))
        return out

    # -- class counts (no emission) --

    def class_counts(self) -> CountReport:
        half = sum(self.nperm * b.length for b in self.blocks)
        swarm = sum(self.nperm * b.n_swarm for b in self.blocks)
        tri = sum(self.nperm * comb(b.length, 2) for b in self.blocks)
        return CountReport(
            overlap_vertices=self.n_overlap,
            perm_vertices=self.nperm * len(self.blocks),
            q_edges=self.nperm * self.E,
            half_edges=half,
            swarm_edges=swarm,
            squares=self.n_squares,
            triangles=tri,
            cubes=self.n_cubes,
            source="layout",
        )

    def total_cells(self) -> int:
        return self.nv + self.ne + self.nf + self.n_cubes

    # -- emissions --

    def q_vertex_ids(self, lo: int, hi: int) -> np.ndarray:
        """Overlap ids of the Q vertices for labelings lo..hi, shape (rows, A)."""
        rows = self.perms[lo:hi]
        A = self.A
        out = np.empty((hi - lo, A), dtype=np.int64)
        ranks = np.arange(lo, hi, dtype=np.int64)
        for c in range(A):
            swapped = rows.copy()
            swapped[:, 0], swapped[:, 1 + c] = rows[:, 1 + c], rows[:, 0]
            rep = np.minimum(ranks, self.rank(swapped))
            out[:, c] = self.overlap_id[rep * A + c]
        return out

    def _placed(self, b: CrossingBlock, j: int, rows: np.ndarray) -> np.ndarray:
        """Labeling rows with the off-crossing agents already placed; crossing cells unset."""
        lab = np.zeros((len(rows), self.N), dtype=np.uint8)
        i = b.length
        lab[:, 1 + self.off_cells[j]] = rows[:, i + 1:]
        return lab

    def midpoint_ids(self, j: int, lo: int, hi: int) -> np.ndarray:
        """Overlap ids of the midpoints of crossing block j, shape (rows, i)."""
        b = self.blocks[j]
        rows = self.perms[lo:hi]
        i = b.length
        cells = np.asarray(b.cells, dtype=np.int64)
        base = self._placed(b, j, rows)
        out = np.empty((hi - lo, i), dtype=np.int64)
        for k in range(1, i + 1):
            lab = base.copy()
            a, c = rows[:, k - 1], rows[:, k]
            lab[:, 0] = np.minimum(a, c)
            lab[:, 1 + cells[k - 1]] = np.maximum(a, c)
            for m in range(1, k):
                lab[:, 1 + cells[m - 1]] = rows[:, m - 1]
            for m in range(k + 1, i + 1):
                lab[:, 1 + cells[m - 1]] = rows[:, m]
            out[:, k - 1] = self.overlap_id[self.rank(lab) * self.A + cells[k - 1]]
        return out

    def shift_ids(self, j: int, lo: int, hi: int) -> np.ndarray:
        """Q-edge ids of the single shifts of crossing block j, shape (rows, i-1)."""
        b = self.blocks[j]
        rows = self.perms[lo:hi]
        i = b.length
        cells = b.cells
        base = self._placed(b, j, rows)
        out = np.empty((hi - lo, max(i - 1, 0)), dtype=np.int64)
        for k in range(1, i):
            lab = base.copy()
            lab[:, 0] = rows[:, k]
            for m in range(1, k + 1):
                lab[:, 1 + cells[m - 1]] = rows[:, m - 1]
            for m in range(k + 1, i + 1):
                lab[:, 1 + cells[m - 1]] = rows[:, m]
            u, v = sorted((cells[k - 1], cells[k]))
            e = self.patrol.edge_index[(u, v)]
            out[:, k - 1] = self.rank(lab) * self.E + e
        return out


@dataclass
class Multiplicities:
    """Emission multiplicities checked while assembling."""

    overlap_from_q: bool = True
    midpoints: bool = True
    single_shift_bijection: bool = True
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.overlap_from_q and self.midpoints and self.single_shift_bijection

    def to_dict(self) -> dict:
        return {
            "overlap_emitted_twice_from_q": self.overlap_from_q,
            "midpoint_emissions_match_crossings": self.midpoints,
            "q_edge_single_shift_bijection": self.single_shift_bijection,
            **self.details,
        }


class _Accumulator:
    """Bincounts of emissions, merged in a fixed order."""

    def __init__(self, lay: Layout):
        self.lay = lay
        self.q_hits = np.zeros(lay.n_overlap, dtype=np.int64)
        self.mid_hits = np.zeros(lay.n_overlap, dtype=np.int64)
        self.shift_hits = np.zeros(lay.nperm * lay.E, dtype=np.int64)
        self.mid_emissions = 0
        self.shift_emissions = 0

    def finish(self) -> Multiplicities:
        lay = self.lay
        m = Multiplicities()
        m.overlap_from_q = bool(np.all(self.q_hits == 2))
        # an overlap vertex at cell c is a midpoint of every attached crossing through c,
        # reached from the two orders of its pair
        through = np.zeros(lay.A, dtype=np.int64)
        for b in lay.blocks:
            through[list(b.cells)] += 1
        cell_of = lay.overlap_keys % lay.A
        m.midpoints = bool(np.array_equal(self.mid_hits, 2 * through[cell_of]))
        attached_edges = np.zeros(lay.E, dtype=bool)
        for b in lay.blocks:
            for u, v in zip(b.cells, b.cells[1:]):
                attached_edges[lay.patrol.edge_index[tuple(sorted((u, v)))]] = True
        want = np.tile(attached_edges.astype(np.int64), lay.nperm)
        m.single_shift_bijection = bool(np.array_equal(self.shift_hits, want))
        m.details = {
            "q_vertex_emissions": int(self.q_hits.sum()),
            "midpoint_emissions": self.mid_emissions,
            "single_shift_emissions": self.shift_emissions,
            "distinct_overlap_vertices": int(np.count_nonzero(self.q_hits | self.mid_hits)),
        }
        return m


def _chunks(n: int, size: int = CHUNK_ROWS):
    return [(lo, min(n, lo + size)) for lo in range(0, n, size)]


def _run(threads: int, jobs):
    """Run zero-argument callables, returning results in submission order."""
    if threads <= 1 or len(jobs) <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: job(), jobs))


def _census(lay: Layout, threads: int) -> tuple[CountReport, Multiplicities]:
    acc = _Accumulator(lay)
    jobs = [lambda lo=lo, hi=hi: lay.q_vertex_ids(lo, hi) for lo, hi in _chunks(lay.nperm)]
    for ids in _run(threads, jobs):
        acc.q_hits += np.bincount(ids.ravel(), minlength=lay.n_overlap)
    for j, b in enumerate(lay.blocks):
        jobs = [
            lambda lo=lo, hi=hi, j=j: (lay.midpoint_ids(j, lo, hi), lay.shift_ids(j, lo, hi))
            for lo, hi in _chunks(lay.nperm)
        ]
        for mids, shifts in _run(threads, jobs):
            acc.mid_hits += np.bincount(mids.ravel(), minlength=lay.n_overlap)
            acc.shift_hits += np.bincount(shifts.ravel(), minlength=len(acc.shift_hits))
            acc.mid_emissions += mids.size
            acc.shift_emissions += shifts.size
    mult = acc.finish()
    # arithmetic dedup: Q vertices come in pairs, midpoints land on Q vertices,
    # single shifts land on Q-edges, every other class is emitted exactly once
    d = mult.details
    report = lay.class_counts()
    report.overlap_vertices = d["q_vertex_emissions"] // 2
    report.source = "census"
    return report, mult


class CoveringComplex(CellComplex):
    """A sealed covering complex that decodes canonical labels from identifiers."""

    layout: Layout
    multiplicities: Multiplicities

    def label(self, d: int, i: int):
        return decode_label(self.layout, d, int(i))

    def labels(self, d: int) -> list:
        return [self.label(d, i) for i in range(self.n(d))]

    def count_report(self) -> CountReport:
        """Class counts read off the stored kind tags."""
        k = self.count_by_kind()
        return CountReport(
            overlap_vertices=k.get(Kind.OVERLAP_VERTEX.title, 0),
            perm_vertices=k.get(Kind.PERM_VERTEX.title, 0),
            q_edges=k.get(Kind.Q_EDGE.title, 0),
            half_edges=k.get(Kind.HALF_EDGE.title, 0),
            swarm_edges=k.get(Kind.SWARM_EDGE.title, 0),
            squares=k.get(Kind.SQUARE.title, 0),
            triangles=k.get(Kind.TRIANGLE.title, 0),
            cubes=k.get(Kind.CUBE.title, 0),
            source="built",
        )


def _block_of(blocks, attr: str, i: int):
    starts = [getattr(b, attr) for b in blocks]
    j = int(np.searchsorted(starts, i, side="right")) - 1
    return j, blocks[j]


def decode_label(lay: Layout, d: int, i: int):
    A, P = lay.A, lay.nperm

    def agents(row):
        return tuple(int(a) + 1 for a in row)

    def labeling(rank):
        row = agents(lay.perms[rank])
        return row[1:], row[0]

    def perm_scope(b, row):
        rho = agents(lay.perms[row])
        return b.xid, rho[b.length + 1:], rho[: b.length + 1]

    if d == 0:
        if i < lay.n_overlap:
            key = int(lay.overlap_keys[i])
            rank, c = divmod(key, A)
            assignment, p = labeling(rank)
            sets = [(a,) for a in assignment]
            sets[c] = tuple(sorted((p, assignment[c])))
            return OverlapVertex(tuple(sets))
        j, b = _block_of(lay.blocks, "vertex0", i)
        return PermVertex(*perm_scope(b, i - b.vertex0))
    if d == 1:
        if i < P * lay.E:
            rank, e = divmod(i, lay.E)
            assignment, p = labeling(rank)
            return QEdge(assignment, p, tuple(int(x) for x in lay.qedges[e]))
        j, b = _block_of(lay.blocks, "half0", i)
        if i < b.swarm0:
            row, k = divmod(i - b.half0, b.length)
            return HalfEdge(*perm_scope(b, row), k + 1)
        row, s = divmod(i - b.swarm0, b.n_swarm)
        return SwarmEdge(*perm_scope(b, row), b.swarm_pairs[s])
    if d == 2:
        if i < lay.n_squares:
            rank, s = divmod(i, lay.S)
            assignment, p = labeling(rank)
            return QSquare(assignment, p, tuple(sorted(lay.patrol.squares[s].cells)))
        t = i - lay.n_squares
        j, b = _block_of(lay.blocks, "triangle0", t)
        row, s = divmod(t - b.triangle0, len(b.pairs))
        return Triangle(*perm_scope(b, row), b.pairs[s])
    if d == 3:
        rank, k = divmod(i, lay.C)
        assignment, p = labeling(rank)
        return QCube(assignment, p, tuple(sorted(lay.patrol.cubes[k].cells)))
    raise IndexError(f"no {d}-cells")


def _full(lay: Layout, threads: int) -> CoveringComplex:
    acc = _Accumulator(lay)
    P, E = lay.nperm, lay.E
    ranks = np.arange(P, dtype=np.int64)

    # vertices: kinds only
    kind0 = np.empty(lay.nv, dtype=np.uint8)
    kind0[: lay.n_overlap] = Kind.OVERLAP_VERTEX
    kind0[lay.n_overlap:] = Kind.PERM_VERTEX

    qv = np.concatenate(
        _run(threads, [lambda lo=lo, hi=hi: lay.q_vertex_ids(lo, hi)
                       for lo, hi in _chunks(P)])
    ) if lay.A else np.zeros((0, 0), dtype=np.int64)
    acc.q_hits += np.bincount(qv.ravel(), minlength=lay.n_overlap)

    # edges
    edge_bnd = np.empty((lay.ne, 2), dtype=np.int32)
    kind1 = np.empty(lay.ne, dtype=np.uint8)
    if E:
        edge_bnd[: P * E] = np.stack(
            [qv[:, lay.qedges[:, 0]], qv[:, lay.qedges[:, 1]]], axis=-1
        ).reshape(-1, 2)
    kind1[: P * E] = Kind.Q_EDGE

    # squares (cyclic edge order) and cubes
    tri_total = lay.nf - lay.n_squares
    face_ptr_parts, face_idx_parts = [], []
    kind2 = np.empty(lay.nf, dtype=np.uint8)
    kind2[: lay.n_squares] = Kind.SQUARE
    kind2[lay.n_squares:] = Kind.TRIANGLE
    if lay.S:
        sq_edges = np.array([s.edges for s in lay.patrol.squares], dtype=np.int64)
        face_idx_parts.append((ranks[:, None, None] * E + sq_edges[None]).reshape(-1))
    del qv

    def per_block(j):
        b = lay.blocks[j]
        i = b.length
        mids = lay.midpoint_ids(j, 0, P)
        shifts = lay.shift_ids(j, 0, P)
        tau = b.vertex0 + ranks
        half_ids = b.half0 + ranks[:, None] * i + np.arange(i)[None, :]
        half = np.stack([mids, np.broadcast_to(tau[:, None], mids.shape)], axis=-1)
        ns = b.n_swarm
        swarm = None
        swarm_ids = None
        if ns:
            sk = np.array([k for k, _ in b.swarm_pairs]) - 1
            sl = np.array([l for _, l in b.swarm_pairs]) - 1
            swarm = np.stack([mids[:, sk], mids[:, sl]], axis=-1)
            swarm_ids = b.swarm0 + ranks[:, None] * ns + np.arange(ns)[None, :]
        tris = np.empty((P, len(b.pairs), 3), dtype=np.int64)
        s = 0
        for t, (k, l) in enumerate(b.pairs):
            if l == k + 1:
                tris[:, t, 0] = shifts[:, k - 1]
            else:
                tris[:, t, 0] = swarm_ids[:, s]
                s += 1
            tris[:, t, 1] = half_ids[:, k - 1]
            tris[:, t, 2] = half_ids[:, l - 1]
        return mids, shifts, half, swarm, tris

    for j, (mids, shifts, half, swarm, tris) in enumerate(
        _run(threads, [lambda j=j: per_block(j) for j in range(len(lay.blocks))])
    ):
        b = lay.blocks[j]
        acc.mid_hits += np.bincount(mids.ravel(), minlength=lay.n_overlap)
        acc.shift_hits += np.bincount(shifts.ravel(), minlength=len(acc.shift_hits))
        acc.mid_emissions += mids.size
        acc.shift_emissions += shifts.size
        n_half = P * b.length
        edge_bnd[b.half0: b.half0 + n_half] = half.reshape(-1, 2)
        kind1[b.half0: b.half0 + n_half] = Kind.HALF_EDGE
        if swarm is not None:
            n_sw = P * b.n_swarm
            edge_bnd[b.swarm0: b.swarm0 + n_sw] = swarm.reshape(-1, 2)
            kind1[b.swarm0: b.swarm0 + n_sw] = Kind.SWARM_EDGE
        face_idx_parts.append(tris.reshape(-1))

    sizes = np.concatenate([
        np.full(lay.n_squares, 4, dtype=np.int64),
        np.full(tri_total, 3, dtype=np.int64),
    ])
    ptr2 = np.zeros(lay.nf + 1, dtype=np.int64)
    np.cumsum(sizes, out=ptr2[1:])
    idx2 = (np.concatenate(face_idx_parts).astype(np.int32)
            if face_idx_parts else np.zeros(0, dtype=np.int32))

    kinds = [kind0, kind1]
    ptrs = [np.zeros(lay.nv + 1, dtype=np.int64), np.arange(0, 2 * lay.ne + 1, 2, dtype=np.int64)]
    idxs = [np.zeros(0, dtype=np.int32), edge_bnd.reshape(-1)]
    if lay.nf:
        kinds.append(kind2)
        ptrs.append(ptr2)
        idxs.append(idx2)
    if lay.n_cubes:
        cube_sq = np.array([c.squares for c in lay.patrol.cubes], dtype=np.int64)
        kinds.append(np.full(lay.n_cubes, Kind.CUBE, dtype=np.uint8))
        ptrs.append(np.arange(0, 6 * lay.n_cubes + 1, 6, dtype=np.int64))
        idxs.append((ranks[:, None, None] * lay.S + cube_sq[None]).reshape(-1).astype(np.int32))

    cx = CoveringComplex.from_arrays(kinds, ptrs, idxs, meta={
        "domain": lay.domain.name or "",
        "A": lay.A,
        "dim": lay.domain.dim,
        "include_degenerate": lay.include_degenerate,
    })
    cx.layout = lay
    cx.multiplicities = acc.finish()
    return cx


def build_covering_complex(
    domain: GridDomain,
    mode: Union[Mode, str] = Mode.FULL,
    threads: Optional[int] = None,
    max_cells: Optional[int] = DEFAULT_MAX_CELLS,
    include_degenerate: bool = False,
):
    """Assemble the covering complex (full mode) or only its class counts (census mode).

    Full mode returns a :class:`CoveringComplex`; census mode returns
    ``(CountReport, Multiplicities)``. ``max_cells`` caps full builds.
    """
    mode = Mode(mode)
    threads = default_threads() if threads is None else max(1, int(threads))
    lay = Layout(domain, include_degenerate)
    if mode is Mode.CENSUS:
        return _census(lay, threads)
    total = lay.total_cells()
    if max_cells is not None and total > max_cells:
        raise ResourceLimit(
            f"full build needs {total} cells, above the cap of {max_cells}; "
            "rerun in census mode"
        )
    return _full(lay, threads)
