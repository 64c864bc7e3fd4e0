"""Small hand-made complexes used as fixtures."""
import itertools

from gridcov.cellcomplex import CellComplex, Kind

RP2_TRIANGLES = [
    (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 6, 2),
    (2, 3, 5), (3, 4, 6), (4, 5, 2), (5, 6, 3), (6, 2, 4),
]


def simplicial(triangles, kind=Kind.TRIANGLE) -> CellComplex:
    cx = CellComplex()
    vid, eid = {}, {}
    for t in triangles:
        for v in t:
            if v not in vid:
                vid[v] = cx.add_cell(0, (), ("v", v))
    for t in triangles:
        for a, b in itertools.combinations(sorted(t), 2):
            if (a, b) not in eid:
                eid[(a, b)] = cx.add_cell(1, (vid[a], vid[b]), ("e", a, b))
        a, b, c = sorted(t)
        cx.add_cell(2, (eid[(a, b)], eid[(a, c)], eid[(b, c)]), ("t", a, b, c), kind)
    return cx.seal()


def cycle_graph(n: int) -> CellComplex:
    cx = CellComplex()
    vs = [cx.add_cell(0, (), ("v", i)) for i in range(n)]
    for i in range(n):
        cx.add_cell(1, (vs[i], vs[(i + 1) % n]), ("e", i))
    return cx


def square_grid(rows: int, cols: int) -> CellComplex:
    """Cubical grid of rows x cols unit squares tagged as squares."""
    cx = CellComplex()
    v = {}
    for r in range(rows + 1):
        for c in range(cols + 1):
            v[(r, c)] = cx.add_cell(0, (), ("v", r, c))
    e = {}
    for (r, c) in list(v):
        for dr, dc in ((0, 1), (1, 0)):
            o = (r + dr, c + dc)
            if o in v:
                e[((r, c), o)] = cx.add_cell(1, (v[(r, c)], v[o]), ("e", r, c, dr), Kind.Q_EDGE)
    for r in range(rows):
        for c in range(cols):
            a, b, d, f = (r, c), (r, c + 1), (r + 1, c + 1), (r + 1, c)
            cyc = [e[(a, b)], e[(b, d)], e[(f, d)], e[(a, f)]]
            cx.add_cell(2, cyc, ("s", r, c), Kind.SQUARE)
    return cx.seal()
