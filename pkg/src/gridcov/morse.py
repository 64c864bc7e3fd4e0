"""Acyclic matching of 2-cells with edges, its verification, and the collapsed Morse data.

The matching only pairs edges with 2-cells. Triangles carry their boundary as
(shift edge, half-edge k, half-edge l); squares carry four edges in cyclic order.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .cellcomplex import CellComplex, Kind, euler_characteristic
from .errors import DimensionUnsupported, MatchingIncomplete, NotAcyclic, Stuck
from .homology import gf2_rank_columns

V_PATH_CAP = 200_000


class Provenance(IntEnum):
    TRIANGLE_SWARM = 0
    TRIANGLE_HALF_EDGE = 1
    SQUARE_BOUNDARY = 2
    SQUARE_WAVEFRONT = 3
    EXTERNAL = 4


@dataclass
class MorseMatching:
    """Pairs (edge, 2-cell) stored as parallel arrays sorted by 2-cell id."""

    edges: np.ndarray
    faces: np.ndarray
    provenance: np.ndarray
    n_edges: int
    n_faces: int

    @classmethod
    def from_pairs(cls, c: CellComplex, pairs) -> "MorseMatching":
        pairs = sorted((int(e), int(f)) for e, f in pairs)
        e = np.array([p[0] for p in pairs], dtype=np.int64)
        f = np.array([p[1] for p in pairs], dtype=np.int64)
        order = np.argsort(f, kind="stable")
        return cls(e[order], f[order], np.full(len(pairs), Provenance.EXTERNAL, dtype=np.uint8),
                   c.n(1), c.n(2))

    def __len__(self) -> int:
        return len(self.faces)

    @property
    def coverage(self) -> np.ndarray:
        out = np.zeros(self.n_faces, dtype=bool)
        out[self.faces] = True
        return out

    def face_partner(self) -> np.ndarray:
        out = np.full(self.n_faces, -1, dtype=np.int64)
        out[self.faces] = self.edges
        return out

    def edge_partner(self) -> np.ndarray:
        out = np.full(self.n_edges, -1, dtype=np.int64)
        out[self.edges] = self.faces
        return out

    def provenance_counts(self) -> dict:
        counts = np.bincount(self.provenance, minlength=len(Provenance))
        return {p.name: int(counts[p]) for p in Provenance if counts[p]}


def _square_edges(c: CellComplex):
    sq_mask = c.kind[2] == Kind.SQUARE
    ids, bnd = c.uniform(2, sq_mask)
    return ids, bnd


def build_matching(c: CellComplex, strict: bool = True) -> MorseMatching:
    """Match every 2-cell with one of its edges.

    Triangles take their swarm edge when it has one, otherwise the half-edge of the
    later position. Squares take an edge lying on no other square (lowest id), then
    the remaining squares are reached breadth first: at each level an unmatched square
    takes its lowest-id free edge shared with a square matched at an earlier level.
    """
    if c.dim > 2 and c.n(3):
        raise DimensionUnsupported("matching is defined for 2-dimensional complexes")
    n1, n2 = c.n(1), c.n(2)
    if c.dim < 2 or n2 == 0:
        z = np.zeros(0, dtype=np.int64)
        return MorseMatching(z, z, np.zeros(0, dtype=np.uint8), n1, n2)
    partner = np.full(n2, -1, dtype=np.int64)
    prov = np.full(n2, 255, dtype=np.uint8)

    tri_ids, tri = c.uniform(2, c.kind[2] == Kind.TRIANGLE)
    if len(tri_ids):
        swarm = c.kind[1][tri[:, 0]] == Kind.SWARM_EDGE
        partner[tri_ids] = np.where(swarm, tri[:, 0], tri[:, 2]).astype(np.int64)
        prov[tri_ids] = np.where(swarm, Provenance.TRIANGLE_SWARM, Provenance.TRIANGLE_HALF_EDGE)

    sq_ids, sq = _square_edges(c)
    if len(sq_ids):
        _match_squares(c, sq_ids, sq, partner, prov)

    done = partner >= 0
    faces = np.flatnonzero(done)
    m = MorseMatching(partner[faces], faces, prov[faces], n1, n2)
    if strict and not done.all():
        raise MatchingIncomplete(np.flatnonzero(~done).tolist())
    return m


def _match_squares(c, sq_ids, sq, partner, prov):
    n1 = c.n(1)
    sq = sq.astype(np.int64)
    degree = np.bincount(sq.reshape(-1), minlength=n1)
    used = np.zeros(n1, dtype=bool)
    used[partner[partner >= 0]] = True

    big = np.iinfo(np.int64).max
    # boundary squares
    cand = np.where(degree[sq] == 1, sq, big)
    best = cand.min(axis=1)
    level = best != big
    matched = np.zeros(len(sq_ids), dtype=bool)
    pick = np.flatnonzero(level)
    partner[sq_ids[pick]] = best[pick]
    prov[sq_ids[pick]] = Provenance.SQUARE_BOUNDARY
    matched[pick] = True
    used[best[pick]] = True

    # wavefront
    frontier = level
    while True:
        # edges touched by the last level
        touched = np.zeros(n1, dtype=bool)
        touched[sq[frontier].reshape(-1)] = True
        cand = np.where(touched[sq] & ~used[sq] & ~matched[:, None], sq, big)
        best = cand.min(axis=1)
        pick = np.flatnonzero(best != big)
        if len(pick) == 0:
            break
        # two squares of one level never share a chosen edge in 2D, but keep it safe
        _, first = np.unique(best[pick], return_index=True)
        pick = pick[first]
        partner[sq_ids[pick]] = best[pick]
        prov[sq_ids[pick]] = Provenance.SQUARE_WAVEFRONT
        matched[pick] = True
        used[best[pick]] = True
        frontier = np.zeros(len(sq_ids), dtype=bool)
        frontier[pick] = True


@dataclass(frozen=True)
class MatchingCheck:
    valid: bool
    acyclic: bool
    complete: bool
    matched: int
    unmatched: int

    @property
    def ok(self) -> bool:
        return self.valid and self.acyclic and self.complete

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "acyclic": self.acyclic,
            "complete": self.complete,
            "matched": self.matched,
            "unmatched": self.unmatched,
        }


def is_valid(c: CellComplex, m: MorseMatching) -> bool:
    if len(m) == 0:
        return True
    if len(np.unique(m.edges)) != len(m) or len(np.unique(m.faces)) != len(m):
        return False
    ptr, idx = c.ptr[2], c.idx[2]
    lengths = ptr[m.faces + 1] - ptr[m.faces]
    starts = np.repeat(ptr[m.faces], lengths)
    offs = np.arange(lengths.sum()) - np.repeat(np.cumsum(lengths) - lengths, lengths)
    hit = idx[starts + offs] == np.repeat(m.edges, lengths)
    found = np.add.reduceat(hit, np.r_[0, np.cumsum(lengths)[:-1]])
    return bool(np.all(found == 1))


def is_acyclic(c: CellComplex, m: MorseMatching) -> bool:
    """No closed V-path: the modified Hasse digraph on edges and 2-cells has no cycle."""
    if c.dim < 2 or len(m) == 0:
        return True
    n1, n2 = c.n(1), c.n(2)
    faces, edges = c.incidence(2)
    up = m.face_partner()[faces] == edges
    src = np.where(up, edges, n1 + faces)
    dst = np.where(up, n1 + faces, edges)
    del faces, edges, up
    g = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n1 + n2, n1 + n2))
    del src, dst
    count, _ = connected_components(g.tocsr(), directed=True, connection="strong")
    return int(count) == n1 + n2


def verify_matching(c: CellComplex, m: MorseMatching) -> MatchingCheck:
    valid = is_valid(c, m)
    acyclic = is_acyclic(c, m) if valid else False
    n2 = c.n(2) if c.dim >= 2 else 0
    complete = len(m) == n2
    return MatchingCheck(valid, acyclic, complete, len(m), n2 - len(m))


@dataclass(frozen=True)
class MorseData:
    critical: dict
    betti: list
    euler: int

    def to_dict(self) -> dict:
        return {
            "critical": {str(d): n for d, n in self.critical.items()},
            "morse_betti": self.betti,
            "euler": self.euler,
        }


def morse_complex(c: CellComplex, m: MorseMatching, cap: int = V_PATH_CAP) -> MorseData:
    """Critical cells and Betti numbers (two-element field) of the Morse complex.

    The Morse boundary of a critical 2-cell is found by following gradient paths;
    critical edges keep their ordinary boundary since no vertex is matched.
    """
    if not is_acyclic(c, m):
        raise NotAcyclic("matching has a closed V-path")
    n0, n1 = c.n(0), c.n(1)
    n2 = c.n(2) if c.dim >= 2 else 0
    edge_matched = np.zeros(n1, dtype=bool)
    edge_matched[m.edges] = True
    crit1 = np.flatnonzero(~edge_matched)
    crit2 = np.flatnonzero(~m.coverage) if n2 else np.zeros(0, dtype=np.int64)
    critical = {0: n0, 1: len(crit1), 2: len(crit2)}
    euler = n0 - len(crit1) + len(crit2)

    # rank of the Morse 1-boundary = n0 minus components of the graph on critical edges
    if len(crit1):
        _, ends = c.uniform(1)
        e = ends[crit1]
        g = coo_matrix((np.ones(len(e), dtype=np.int8), (e[:, 0], e[:, 1])), shape=(n0, n0))
        b0 = int(connected_components(g.tocsr(), directed=False)[0])
    else:
        b0 = n0
    r1 = n0 - b0
    r2 = 0
    if len(crit2):
        if c.total_cells() > cap:
            raise ValueError("critical 2-cells on a large complex; gradient paths not traced")
        r2 = gf2_rank_columns(_morse_boundary_2(c, m, crit1, crit2))
    betti = [n0 - r1, len(crit1) - r1 - r2]
    if n2:
        betti.append(len(crit2) - r2)
    return MorseData(critical, betti, euler)


def _morse_boundary_2(c, m, crit1, crit2):
    """Columns (as critical-edge index lists) of the Morse 2-boundary, mod 2."""
    crit_index = {int(e): k for k, e in enumerate(crit1)}
    edge_partner = m.edge_partner()
    memo: dict[int, int] = {}

    def flow(e: int) -> int:
        # bitset over critical edges reached from edge e along gradient paths
        stack = [(e, False)]
        while stack:
            x, expanded = stack.pop()
            if x in memo:
                continue
            if x in crit_index:
                memo[x] = 1 << crit_index[x]
                continue
            f = int(edge_partner[x])
            others = [int(y) for y in c.boundary(2, f) if int(y) != x]
            if expanded:
                v = 0
                for y in others:
                    v ^= memo[y]
                memo[x] = v
            else:
                stack.append((x, True))
                stack.extend((y, False) for y in others if y not in memo)
        return memo[e]

    for f in crit2:
        v = 0
        for e in c.boundary(2, int(f)):
            v ^= flow(int(e))
        yield [k for k in range(v.bit_length()) if v >> k & 1]


@dataclass(frozen=True)
class CollapseSchedule:
    """Elementary collapses (edge, 2-cell) in a valid order, grouped in rounds."""

    edges: np.ndarray
    faces: np.ndarray
    rounds: int
    remainder: dict

    def __len__(self) -> int:
        return len(self.faces)

    def steps(self):
        return zip(self.edges.tolist(), self.faces.tolist())


def free_collapse_schedule(c: CellComplex, m: MorseMatching) -> CollapseSchedule:
    """Collapse matched pairs whose edge is currently free, round by round.

    Within a round every chosen edge has its partner as sole live coface, so the
    collapses of one round commute. Raises Stuck if matched pairs or 2-cells remain.
    """
    n1 = c.n(1)
    n2 = c.n(2) if c.dim >= 2 else 0
    if n2 == 0:
        return CollapseSchedule(np.zeros(0, np.int64), np.zeros(0, np.int64), 0,
                                {"0": c.n(0), "1": n1})
    owners, faces = c.incidence(2)
    alive = np.ones(n2, dtype=bool)
    pending = np.zeros(n2, dtype=bool)
    pending[m.faces] = True
    partner = m.face_partner()
    live_deg = np.bincount(faces, minlength=n1)
    out_e, out_f = [], []
    rounds = 0
    while True:
        cand = np.flatnonzero(pending)
        if len(cand) == 0:
            break
        ready = cand[live_deg[partner[cand]] == 1]
        if len(ready) == 0:
            break
        rounds += 1
        out_e.append(partner[ready])
        out_f.append(ready)
        alive[ready] = False
        pending[ready] = False
        keep = alive[owners]
        owners, faces = owners[keep], faces[keep]
        live_deg = np.bincount(faces, minlength=n1)
    left_pairs = int(pending.sum())
    left_cells = int(alive.sum())
    if left_pairs or left_cells:
        raise Stuck(left_pairs, left_cells)
    edges = np.concatenate(out_e) if out_e else np.zeros(0, np.int64)
    fs = np.concatenate(out_f) if out_f else np.zeros(0, np.int64)
    remainder = {"0": c.n(0), "1": n1 - len(edges)}
    return CollapseSchedule(edges, fs, rounds, remainder)


def collapse_report(c: CellComplex, m: MorseMatching) -> dict:
    check = verify_matching(c, m)
    out = check.to_dict()
    out["provenance"] = m.provenance_counts()
    if check.valid and check.acyclic:
        data = morse_complex(c, m)
        out.update(data.to_dict())
        out["euler_matches"] = data.euler == euler_characteristic(c)
    return out
