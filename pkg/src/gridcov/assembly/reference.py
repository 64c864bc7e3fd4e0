"""Label-driven construction of the covering complex, one cell at a time.

Slow but direct: every cell is named by :func:`canonical_label` and merged by the
deduplicating :meth:`CellComplex.add_cell`. Used to cross-check the vectorized
builder on small domains.
"""
from __future__ import annotations

import itertools

from ..cellcomplex import CellComplex, Kind
from ..griddomain import GridDomain
from .labels import GluingContext, canonical_label, enumerate_labelings


def build_reference(domain: GridDomain, include_degenerate: bool = False) -> CellComplex:
    ctx = GluingContext(domain)
    q = ctx.patrol
    cx = CellComplex()
    for lab in enumerate_labelings(ctx.A):
        vid = [
            cx.add_cell(0, (), canonical_label(ctx, "q_vertex", labeling=lab, cell=c),
                        Kind.OVERLAP_VERTEX)
            for c in range(ctx.A)
        ]
        eid = [
            cx.add_cell(1, (vid[u], vid[v]),
                        canonical_label(ctx, "q_edge", labeling=lab, cells=(u, v)), Kind.Q_EDGE)
            for u, v in q.edges
        ]
        sid = [
            cx.add_cell(2, [eid[j] for j in sq.edges],
                        canonical_label(ctx, "q_square", labeling=lab, cells=sq.cells),
                        Kind.SQUARE)
            for sq in q.squares
        ]
        for cube in q.cubes:
            cx.add_cell(3, [sid[j] for j in cube.squares],
                        canonical_label(ctx, "q_cube", labeling=lab, cells=cube.cells), Kind.CUBE)

    agents = range(1, ctx.N + 1)
    for xid, x in enumerate(ctx.crossings):
        if x.degenerate and not include_degenerate:
            continue
        i = x.length
        for rho in itertools.permutations(agents):
            arrangement, off = rho[: i + 1], rho[i + 1:]
            desc = dict(crossing=xid, off=off, arrangement=arrangement)
            tau = cx.add_cell(0, (), canonical_label(ctx, "perm_vertex", **desc), Kind.PERM_VERTEX)
            mids = [
                cx.add_cell(0, (), canonical_label(ctx, "midpoint", position=k, **desc),
                            Kind.OVERLAP_VERTEX)
                for k in range(1, i + 1)
            ]
            halves = [
                cx.add_cell(1, (mids[k - 1], tau),
                            canonical_label(ctx, "half_edge", position=k, **desc), Kind.HALF_EDGE)
                for k in range(1, i + 1)
            ]
            for k, l in itertools.combinations(range(1, i + 1), 2):
                ends = (mids[k - 1], mids[l - 1])
                if l == k + 1:
                    label = canonical_label(ctx, "single_shift", positions=(k, l), **desc)
                    shift = cx.add_cell(1, ends, label, Kind.Q_EDGE)
                else:
                    label = canonical_label(ctx, "swarm_edge", positions=(k, l), **desc)
                    shift = cx.add_cell(1, ends, label, Kind.SWARM_EDGE)
                cx.add_cell(2, (shift, halves[k - 1], halves[l - 1]),
                            canonical_label(ctx, "triangle", positions=(k, l), **desc),
                            Kind.TRIANGLE)
    return cx.seal()
