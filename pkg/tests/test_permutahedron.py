from math import factorial

import pytest
from gridcov.cellcomplex import euler_characteristic
from gridcov.errors import SamePosition
from gridcov.homology import betti, boundary_squared_zero, peel_top_cells
from gridcov.morse import build_matching, free_collapse_schedule, verify_matching
from gridcov.permutahedron import (
    Shift, classify_shift, expected_expansion_counts, face_count, k_skeleton, skel1,
    stirling2, subdivide_and_expand, transpose,
)


def test_classify_shift():
    v = (1, 2, 3, 4, 5)
    assert classify_shift(v, (1, 2)) is Shift.SINGLE
    assert classify_shift(v, (3, 2)) is Shift.SINGLE
    assert classify_shift(v, (1, 3)) is Shift.SWARM
    with pytest.raises(SamePosition):
        classify_shift(v, (2, 2))
    with pytest.raises(ValueError):
        classify_shift(v, (0, 2))


def test_transpose_is_involution():
    p = (3, 1, 2)
    assert transpose(p, 1) == (1, 3, 2)
    assert transpose(transpose(p, 2), 2) == p


@pytest.mark.parametrize("m, v, e", [(1, 1, 0), (2, 2, 1), (3, 6, 6), (4, 24, 36), (5, 120, 240)])
def test_skel1_counts(m, v, e):
    p = skel1(m)
    assert (len(p.vertices), len(p.edges)) == (v, e)
    assert all(p.degree(i) == m - 1 for i in range(len(p.vertices)))


def test_hexagon():
    cx = skel1(3).to_complex()
    assert betti(cx) == [1, 1]


def test_stirling_known_values():
    assert [stirling2(4, k) for k in range(5)] == [0, 1, 7, 6, 1]
    assert stirling2(0, 0) == 1


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_face_lattice_counts_and_polytope_euler(m):
    lat = k_skeleton(m, m - 1)
    counts = lat.counts()
    for d in range(m):
        assert counts[d] == face_count(m, d)
    # the full polytope is contractible
    assert lat.euler() == 1
    cx = lat.to_complex()
    assert boundary_squared_zero(cx)
    assert betti(cx)[0] == 1


def test_k_skeleton_small():
    lat = k_skeleton(4, 1)
    assert lat.counts() == {0: 24, 1: 36}
    with pytest.raises(ValueError):
        k_skeleton(3, 3)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_expansion_counts(m):
    p = subdivide_and_expand(skel1(m))
    want = expected_expansion_counts(m)
    got = p.counts()
    for key, value in want.items():
        assert got[key] == value, key
    assert euler_characteristic(p.to_complex()) == p.euler()


def test_expansion_homotopy_type():
    # the expansion only adds triangles on subdivided corners, so it keeps the
    # homotopy type of the 1-skeleton
    for m in (3, 4):
        base = skel1(m).to_complex()
        exp = subdivide_and_expand(skel1(m)).to_complex()
        assert betti(exp) == betti(base) + [0]
        assert peel_top_cells(exp)


def test_hexagon_expansion_matching_and_collapse():
    cx = subdivide_and_expand(skel1(3)).to_complex()
    m = build_matching(cx)
    assert verify_matching(cx, m).ok
    assert len(m) == 6
    assert len(set(m.edges.tolist())) == 6
    assert len(free_collapse_schedule(cx, m)) == 6


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_single_triangles_get_distinct_half_edges(d):
    # a vertex of degree d carries d-1 single triangles; each gets its own half-edge
    m = d + 1
    cx = subdivide_and_expand(skel1(m)).to_complex()
    mt = build_matching(cx)
    per_vertex = {}
    for e, f in zip(mt.edges.tolist(), mt.faces.tolist()):
        per_vertex.setdefault(cx.label(2, f)[1], []).append(e)
    assert len(per_vertex) == factorial(m)
    for edges in per_vertex.values():
        assert len(edges) == len(set(edges)) == d * (d - 1) // 2
    assert verify_matching(cx, mt).ok
