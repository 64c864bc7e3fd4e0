"""Euler characteristic, components, Betti numbers and H1 torsion of a CellComplex."""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .cellcomplex import CellComplex, euler_characteristic
from .errors import ResourceLimit

DEFAULT_ELIMINATION_CAP = 400_000
DEFAULT_TORSION_CAP = 20_000


# -- components ------------------------------------------------------------------


def component_labels(c: CellComplex) -> tuple[int, np.ndarray]:
    nv = c.n(0)
    if c.dim < 1 or c.n(1) == 0:
        return nv, np.arange(nv)
    _, ends = c.uniform(1)
    graph = coo_matrix(
        (np.ones(len(ends), dtype=np.int8), (ends[:, 0], ends[:, 1])), shape=(nv, nv)
    ).tocsr()
    return connected_components(graph, directed=False)


@dataclass(frozen=True)
class Components:
    count: int
    representatives: tuple  # lowest vertex id of each component

    def labels(self, c: CellComplex) -> list:
        return [c.label(0, v) for v in self.representatives]


def components(c: CellComplex) -> Components:
    count, labels = component_labels(c)
    first = np.full(count, -1, dtype=np.int64)
    order = np.arange(len(labels))[::-1]
    first[labels[order]] = order
    return Components(int(count), tuple(int(x) for x in np.sort(first)))


def union_find_components(c: CellComplex) -> int:
    """Component count by plain union-find (independent of scipy)."""
    parent = list(range(c.n(0)))

    def root(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = c.n(0)
    if c.dim >= 1:
        _, ends = c.uniform(1)
        for a, b in ends.tolist():
            ra, rb = root(a), root(b)
            if ra != rb:
                parent[ra] = rb
                count -= 1
    return count


# -- structural checks -----------------------------------------------------------


def boundary_squared_zero(c: CellComplex, chunk: int = 1_000_000) -> bool:
    """Every (d-2)-cell occurs an even number of times in the boundary of the boundary."""
    for d in range(2, c.dim + 1):
        n = c.n(d)
        sub_n = c.n(d - 2)
        faces_ptr, faces_idx = c.ptr[d - 1], c.idx[d - 1]
        for lo in range(0, n, chunk):
            hi = min(n, lo + chunk)
            start, stop = c.ptr[d][lo], c.ptr[d][hi]
            owners = np.repeat(
                np.arange(lo, hi, dtype=np.int64), np.diff(c.ptr[d][lo:hi + 1])
            )
            faces = c.idx[d][start:stop].astype(np.int64)
            flen = faces_ptr[faces + 1] - faces_ptr[faces]
            owners2 = np.repeat(owners, flen)
            starts = np.repeat(faces_ptr[faces], flen)
            offs = np.arange(len(starts)) - np.repeat(np.cumsum(flen) - flen, flen)
            subs = faces_idx[starts + offs].astype(np.int64)
            keys = np.sort(owners2 * sub_n + subs)
            if len(keys) % 2:
                return False
            if not np.array_equal(keys[0::2], keys[1::2]):
                return False
    return True


# -- GF(2) elimination -------------------------------------------------------------


def gf2_rank_columns(columns) -> int:
    """Rank over the two-element field of a matrix given as iterables of row indices.

    Columns are bitsets (Python ints) reduced by their highest set bit.
    """
    pivots: dict[int, int] = {}
    rank = 0
    for col in columns:
        v = 0
        for r in col:
            v ^= 1 << int(r)
        while v:
            top = v.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = v
                rank += 1
                break
            v ^= p
    return rank


def boundary_rank_gf2(c: CellComplex, d: int) -> int:
    if d < 1 or d > c.dim or c.n(d) == 0:
        return 0
    if d == 1:
        return c.n(0) - component_labels(c)[0]
    ptr, idx = c.ptr[d], c.idx[d]
    return gf2_rank_columns(idx[ptr[i]:ptr[i + 1]].tolist() for i in range(c.n(d)))


def peel_top_cells(c: CellComplex) -> bool:
    """Greedy free-face peeling of all 2-cells (complexes of dimension 2).

    Success certifies that the 2-boundary has full column rank over any field.
    Every round removes each 2-cell that currently owns a free edge.
    """
    if c.dim != 2:
        raise ValueError("peeling certificate implemented for 2-dimensional complexes")
    n2 = c.n(2)
    alive = np.ones(n2, dtype=bool)
    owners, faces = c.incidence(2)
    count = np.bincount(faces, minlength=c.n(1))
    # for an edge with exactly one live coface, recover the coface as the sum of
    # live owners (weighted bincount)
    while True:
        live = alive[owners]
        owner_sum = np.bincount(faces[live], weights=owners[live].astype(np.float64),
                                minlength=c.n(1))
        free = np.flatnonzero(count == 1)
        if len(free) == 0:
            break
        victims = np.unique(owner_sum[free].astype(np.int64))
        victims = victims[alive[victims]]
        if len(victims) == 0:
            break
        alive[victims] = False
        gone = ~alive[owners]
        count = np.bincount(faces[~gone], minlength=c.n(1))
        owners, faces = owners[~gone], faces[~gone]
        if not alive.any():
            break
    return not alive.any()


def betti(c: CellComplex, max_dim: int | None = None,
          cap: int = DEFAULT_ELIMINATION_CAP, method: str = "auto") -> list[int]:
    """Betti numbers over the two-element field.

    ``method='elimination'`` ranks every boundary matrix by sparse elimination
    (refused above ``cap`` cells). ``method='peel'`` (2-dimensional complexes
    only) proves the 2-boundary injective by free-face peeling, takes b0 from
    graph components and b1 from the Euler characteristic. ``auto`` picks
    elimination under the cap and peeling above it.
    """
    top = c.dim if max_dim is None else min(max_dim, c.dim)
    total = c.total_cells()
    if method == "auto":
        method = "elimination" if total <= cap else "peel"
    if method == "elimination":
        if total > cap:
            raise ResourceLimit(
                f"{total} cells exceed the elimination cap {cap}; use census mode or peel"
            )
        ranks = [0] + [boundary_rank_gf2(c, d) for d in range(1, c.dim + 1)] + [0]
        return [c.n(d) - ranks[d] - ranks[d + 1] for d in range(top + 1)]
    if method == "peel":
        if c.dim > 2:
            raise ResourceLimit("peeling route covers complexes of dimension <= 2 only")
        b0 = int(component_labels(c)[0])
        if c.dim < 2:
            ranks1 = c.n(0) - b0
            out = [b0, c.n(1) - ranks1] if c.dim == 1 else [b0]
            return out[: top + 1]
        if not peel_top_cells(c):
            raise ResourceLimit("free-face peeling stalled; 2-boundary rank unknown at this size")
        b2 = 0
        b1 = b0 + b2 - euler_characteristic(c)
        return [b0, b1, b2][: top + 1]
    raise ValueError(f"unknown method {method!r}")


# -- integral torsion ---------------------------------------------------------------


def _cycle_signs(c: CellComplex, edges) -> list[tuple[int, int]]:
    """Orient a 2-cell whose boundary edges form one cycle; returns (edge, +-1)."""
    edges = [int(e) for e in edges]
    ends = {e: tuple(int(x) for x in c.boundary(1, e)) for e in edges}
    at = {}
    for e, (u, v) in ends.items():
        at.setdefault(u, []).append(e)
        at.setdefault(v, []).append(e)
    if any(len(v) != 2 for v in at.values()):
        raise ValueError("2-cell boundary is not a simple cycle")
    out = []
    e = edges[0]
    u, v = ends[e]
    out.append((e, 1))
    cur, used = v, {e}
    while len(out) < len(edges):
        nxt = next(x for x in at[cur] if x not in used)
        a, b = ends[nxt]
        out.append((nxt, 1 if a == cur else -1))
        cur = b if a == cur else a
        used.add(nxt)
    return out


def _smith_diagonal(rows: list[list[int]]) -> list[int]:
    """Nonzero diagonal of the Smith normal form of a small dense integer matrix."""
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    for t in range(min(m, n)):
        while True:
            nz = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
            if not nz:
                return diag
            _, pi, pj = min(nz)
            a[t], a[pi] = a[pi], a[t]
            for row in a:
                row[t], row[pj] = row[pj], row[t]
            p = a[t][t]
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
            if any(a[i][t] for i in range(t + 1, m)) or any(a[t][j] for j in range(t + 1, n)):
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
        diag.append(abs(a[t][t]))
    return diag


def invariant_factors(columns: list[dict[int, int]]) -> list[int]:
    """Invariant factors (> 1) of a sparse integer matrix given column-wise.

    Unit pivots are eliminated with a Markowitz-style choice; whatever remains is
    handed to a dense Smith normal form.
    """
    cols = {j: dict(col) for j, col in enumerate(columns) if col}
    rows: dict[int, set] = {}
    for j, col in cols.items():
        for r in col:
            rows.setdefault(r, set()).add(j)
    heap = [(len(col), j) for j, col in cols.items()]
    heapq.heapify(heap)
    stalled = []
    while heap:
        size, j = heapq.heappop(heap)
        col = cols.get(j)
        if col is None:
            continue
        if len(col) != size:
            heapq.heappush(heap, (len(col), j))
            continue
        units = [r for r, v in col.items() if v in (1, -1)]
        if not units:
            stalled.append(j)
            continue
        r = min(units, key=lambda x: (len(rows[x]), x))
        pv = col[r]
        for k in sorted(rows[r] - {j}):
            other = cols[k]
            factor = other[r] * pv  # pv is its own inverse
            for rr, v in col.items():
                nv = other.get(rr, 0) - factor * v
                if nv:
                    if rr not in other:
                        rows[rr].add(k)
                    other[rr] = nv
                elif rr in other:
                    del other[rr]
                    rows[rr].discard(k)
            if not other:
                del cols[k]
            else:
                heapq.heappush(heap, (len(other), k))
        for rr in col:
            rows[rr].discard(j)
        del cols[j]
        del rows[r]
        # stalled columns may have gained unit entries
        for k in stalled:
            if k in cols:
                heapq.heappush(heap, (len(cols[k]), k))
        stalled = []
    if not cols:
        return []
    row_ids = sorted({r for col in cols.values() for r in col})
    pos = {r: i for i, r in enumerate(row_ids)}
    dense = [[0] * len(cols) for _ in row_ids]
    for jj, col in enumerate(cols.values()):
        for r, v in col.items():
            dense[pos[r]][jj] = v
    return sorted(d for d in _smith_diagonal(dense) if d > 1)


def integral_h1_torsion(c: CellComplex, cap: int = DEFAULT_TORSION_CAP) -> list[int]:
    """Torsion coefficients of H1 over the integers (invariant factors > 1 of the 2-boundary)."""
    if c.total_cells() > cap:
        raise ResourceLimit(f"{c.total_cells()} cells exceed the torsion cap {cap}")
    if c.dim < 2:
        return []
    columns = []
    for i in range(c.n(2)):
        col: dict[int, int] = {}
        for e, s in _cycle_signs(c, c.boundary(2, i)):
            col[e] = col.get(e, 0) + s
        columns.append({e: v for e, v in col.items() if v})
    return invariant_factors(columns)
