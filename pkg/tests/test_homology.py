import pytest

from gridcov.errors import ResourceLimit
from gridcov.homology import (
    betti, boundary_squared_zero, components, integral_h1_torsion, invariant_factors,
    peel_top_cells, union_find_components, _smith_diagonal,
)
from gridcov.cellcomplex import CellComplex

from helpers import RP2_TRIANGLES, cycle_graph, simplicial, square_grid

# boundary of the tetrahedron: a 2-sphere
SPHERE = [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]


def test_rp2_mod2_betti_and_torsion():
    cx = simplicial(RP2_TRIANGLES)
    assert boundary_squared_zero(cx)
    assert betti(cx) == [1, 1, 1]
    assert integral_h1_torsion(cx) == [2]
    assert not peel_top_cells(cx)


def test_sphere():
    cx = simplicial(SPHERE)
    assert betti(cx) == [1, 0, 1]
    assert integral_h1_torsion(cx) == []


def test_disk_peels():
    cx = square_grid(3, 3)
    assert peel_top_cells(cx)
    assert betti(cx) == [1, 0, 0]
    assert betti(cx, method="peel") == [1, 0, 0]
    assert integral_h1_torsion(cx) == []


def test_graph_betti_and_components():
    cx = cycle_graph(5).seal()
    assert betti(cx) == [1, 1]
    assert components(cx).count == 1
    assert union_find_components(cx) == 1


def test_components_representatives():
    cx = CellComplex()
    a, b, c = (cx.add_cell(0, (), i) for i in range(3))
    cx.add_cell(1, (a, c), "ac")
    cx.seal()
    comps = components(cx)
    assert comps.count == 2 and comps.representatives == (0, 1)
    assert union_find_components(cx) == 2


def test_peel_refuses_stalled_complex():
    with pytest.raises(ResourceLimit):
        betti(simplicial(SPHERE), method="peel")


def test_elimination_cap():
    with pytest.raises(ResourceLimit):
        betti(square_grid(3, 3), method="elimination", cap=10)
    with pytest.raises(ResourceLimit):
        integral_h1_torsion(square_grid(3, 3), cap=10)


def test_smith_diagonal_known():
    assert _smith_diagonal([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]


def test_invariant_factors_sparse():
    # columns of diag(1, 3) plus a dependent column
    assert invariant_factors([{0: 1}, {1: 3}, {0: 2, 1: 3}]) == [3]
    # gcd of entries 2, |det| 8
    assert invariant_factors([{0: 2, 1: 2}, {0: 2, 1: -2}]) == [2, 4]


def test_bad_boundary_detected():
    cx = CellComplex()
    v = [cx.add_cell(0, (), i) for i in range(3)]
    e = [cx.add_cell(1, (v[0], v[1]), "a"), cx.add_cell(1, (v[1], v[2]), "b")]
    cx.add_cell(2, (e[0], e[1]), "open")
    cx.seal()
    assert not boundary_squared_zero(cx)
