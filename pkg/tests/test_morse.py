import numpy as np
import pytest

from gridcov.assembly import build_covering_complex
from gridcov.cellcomplex import CellComplex, Kind, euler_characteristic
from gridcov.errors import DimensionUnsupported, MatchingIncomplete, NotAcyclic, Stuck
from gridcov.homology import betti
from gridcov.morse import (
    MorseMatching, Provenance, build_matching, free_collapse_schedule, is_acyclic,
    morse_complex, verify_matching,
)

from conftest import SMALL, domain
from helpers import simplicial, square_grid


def pillow():
    """Two squares glued along their whole boundary (a 2-sphere)."""
    cx = CellComplex()
    v = [cx.add_cell(0, (), i) for i in range(4)]
    e = [cx.add_cell(1, (v[i], v[(i + 1) % 4]), ("e", i), Kind.Q_EDGE) for i in range(4)]
    cx.add_cell(2, e, "top", Kind.SQUARE)
    cx.add_cell(2, e, "bottom", Kind.SQUARE)
    return cx


def hexagon_with_triangle():
    cx = CellComplex()
    v = [cx.add_cell(0, (), i) for i in range(7)]
    e = [cx.add_cell(1, (v[i], v[(i + 1) % 6]), ("e", i)) for i in range(6)]
    spoke_a = cx.add_cell(1, (v[0], v[6]), "a6")
    spoke_b = cx.add_cell(1, (v[1], v[6]), "b6")
    # boundary order (shift, half, half): the matched edge is the last one
    cx.add_cell(2, (e[0], spoke_b, spoke_a), "t", Kind.TRIANGLE)
    return cx.seal()


def test_cyclic_pair_is_not_acyclic():
    cx = pillow().seal()
    m = MorseMatching.from_pairs(cx, [(0, 0), (1, 1)])
    check = verify_matching(cx, m)
    assert check.valid and check.complete and not check.acyclic
    with pytest.raises(NotAcyclic):
        morse_complex(cx, m)


def test_single_pair_is_acyclic():
    cx = pillow().seal()
    assert is_acyclic(cx, MorseMatching.from_pairs(cx, [(2, 0)]))


def test_invalid_pairs_detected():
    cx = hexagon_with_triangle()
    # edge 3 is not on the triangle
    assert not verify_matching(cx, MorseMatching.from_pairs(cx, [(3, 0)])).valid


def test_unreachable_squares_raise():
    with pytest.raises(MatchingIncomplete) as info:
        build_matching(pillow().seal())
    assert info.value.unmatched == [0, 1]
    partial = build_matching(pillow().seal(), strict=False)
    assert len(partial) == 0


def test_hexagon_with_triangle():
    cx = hexagon_with_triangle()
    m = build_matching(cx)
    assert m.edges.tolist() == [cx.find("a6")[1]]
    assert m.provenance.tolist() == [Provenance.TRIANGLE_HALF_EDGE]
    assert verify_matching(cx, m).ok
    data = morse_complex(cx, m)
    assert data.betti == [1, 1, 0] == betti(cx)
    assert data.critical == {0: 7, 1: 7, 2: 0}
    assert len(free_collapse_schedule(cx, m)) == 1


def test_wavefront_reaches_interior_square():
    cx = square_grid(3, 3)
    m = build_matching(cx)
    prov = m.provenance_counts()
    assert prov == {"SQUARE_BOUNDARY": 8, "SQUARE_WAVEFRONT": 1}
    assert verify_matching(cx, m).ok
    sched = free_collapse_schedule(cx, m)
    assert len(sched) == 9
    assert morse_complex(cx, m).betti == [1, 0, 0]


def test_wavefront_larger_grid():
    cx = square_grid(5, 6)
    m = build_matching(cx)
    assert verify_matching(cx, m).ok
    assert len(free_collapse_schedule(cx, m)) == 30


def test_gradient_paths_with_critical_face():
    tris = [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]
    cx = simplicial(tris, kind=Kind.OTHER)
    e = {lab[1:]: i for i, lab in enumerate(cx.labels(1))}
    f = {lab[1:]: i for i, lab in enumerate(cx.labels(2))}
    m = MorseMatching.from_pairs(cx, [
        (e[(1, 2)], f[(1, 2, 4)]), (e[(1, 4)], f[(1, 3, 4)]), (e[(3, 4)], f[(2, 3, 4)]),
    ])
    assert is_acyclic(cx, m)
    data = morse_complex(cx, m)
    assert data.critical == {0: 4, 1: 3, 2: 1}
    assert data.betti == betti(cx) == [1, 0, 1]
    assert data.euler == euler_characteristic(cx)
    with pytest.raises(Stuck):
        free_collapse_schedule(cx, m)


def test_unmatched_square_is_stuck():
    cx = square_grid(1, 1)
    empty = MorseMatching.from_pairs(cx, [])
    with pytest.raises(Stuck) as info:
        free_collapse_schedule(cx, empty)
    assert info.value.remaining_cells == 1


def test_three_cells_rejected():
    cx = pillow()
    cx.add_cell(3, (0, 1), "ball")
    with pytest.raises(DimensionUnsupported):
        build_matching(cx.seal())


@pytest.mark.parametrize("key", SMALL + ["2x3"])
def test_covering_complex_collapses(key):
    c = build_covering_complex(domain(key))
    m = build_matching(c)
    assert verify_matching(c, m).ok
    sched = free_collapse_schedule(c, m)
    assert len(sched) == c.n(2)
    data = morse_complex(c, m)
    assert data.critical[2] == 0
    assert data.betti == betti(c)
    assert data.euler == euler_characteristic(c)


def test_square_matching_census():
    c = build_covering_complex(domain("2x2"))
    m = build_matching(c)
    assert len(m) == 600
    assert m.provenance_counts() == {"TRIANGLE_HALF_EDGE": 480, "SQUARE_BOUNDARY": 120}
    is_square = c.kind[2] == Kind.SQUARE
    _, square_edges = c.uniform(2, is_square)
    # every square edge lies on the boundary of its patrol region
    assert np.all(c.cofaces_count(2, is_square)[square_edges] == 1)
    assert len(square_edges) == 120


def test_collapse_order_is_valid():
    c = build_covering_complex(domain("1x4"))
    m = build_matching(c)
    alive = np.ones(c.n(2), bool)
    owners, faces = c.incidence(2)
    for edge, face in free_collapse_schedule(c, m).steps():
        live = alive[owners] & (faces == edge)
        assert owners[live].tolist() == [face]
        alive[face] = False
