import json

import pytest
from hypothesis import given, settings, strategies as st

from gridcov.errors import (
    DimensionUnsupported, Disconnected, EmptyDomain, Infeasible, MalformedInput,
)
from gridcov.griddomain import (
    GridDomain, check_area_lemma, count_pinches, crossings, cubical_face_counts,
    domain_summary, parse_domain, patrol_region, random_domain, serialize_domain,
)

from conftest import SHAPES, domain


def test_parse_ascii_normalizes_and_orders():
    g = parse_domain("..\n.#\n##\n")
    assert g.dim == 2
    assert g.cells == ((0, 1), (1, 0), (1, 1))
    assert g.shape == (2, 2)


def test_parse_json_and_roundtrip():
    g = parse_domain('{"cells": [[5, 5], [5, 6]], "name": "bar"}')
    assert g.cells == ((0, 0), (0, 1)) and g.name == "bar"
    again = parse_domain(serialize_domain(g, "json"))
    assert again.cells == g.cells
    assert parse_domain(serialize_domain(domain("ring"))).cells == domain("ring").cells


def test_parse_3d_layers():
    g = parse_domain("##\n##\n\n##\n##\n")
    assert g.dim == 3 and g.A == 8
    assert parse_domain(serialize_domain(g)).cells == g.cells


@pytest.mark.parametrize("text, exc", [
    ("", EmptyDomain),
    ("...\n...", EmptyDomain),
    ("#.#", Disconnected),
    ("#x", MalformedInput),
    ("##\n###", MalformedInput),
    ("##\n\n\n##", MalformedInput),
    ("{bad json", MalformedInput),
    ('{"nocells": 1}', MalformedInput),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_domain(text)


def test_malformed_reports_position():
    with pytest.raises(MalformedInput) as info:
        parse_domain("##\n#?")
    assert info.value.line == 2 and info.value.column == 2


def test_disconnected_lists_components():
    with pytest.raises(Disconnected) as info:
        GridDomain.from_cells([(0, 0), (0, 2), (5, 5)])
    assert len(info.value.components) == 3


@pytest.mark.parametrize("key, euler, holes", [
    ("2x2", 1, 0), ("ring", 0, 1), ("L4", 1, 0), ("1x5", 1, 0),
])
def test_summary(key, euler, holes):
    s = domain_summary(domain(key))
    assert (s.euler, s.holes_g, s.pinches) == (euler, holes, 0)


def test_cubical_counts_of_unit_cube_block():
    # 2x2x2 block of unit cubes: 27 vertices, 54 edges, 36 squares, 8 cubes
    g = parse_domain("##\n##\n\n##\n##")
    assert cubical_face_counts(g) == [27, 54, 36, 8]
    assert domain_summary(g).euler == 1


def test_pinch_detected():
    g = GridDomain.from_cells([(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 1)])
    assert count_pinches(g) == 0
    pinched = parse_domain("##.\n#.#\n###")
    # (0,1) and (1,2) meet only at a corner
    assert count_pinches(pinched) == 1


def test_patrol_region_2x3():
    q = patrol_region(domain("2x3"))
    assert q.face_counts() == [6, 7, 2]
    assert q.K == 2 and q.euler() == 1
    for sq in q.squares:
        assert len(sq.edges) == 4


def test_patrol_region_cube():
    q = patrol_region(parse_domain("##\n##\n\n##\n##"))
    assert q.face_counts() == [8, 12, 6, 1]
    assert len(q.cubes[0].squares) == 6


def test_crossings_histogram():
    c = crossings(patrol_region(domain("ring")))
    assert c.histogram() == {1: 2 + 2, 3: 4}
    assert c.histogram(include_degenerate=False) == {3: 4}
    assert len(c.nondegenerate()) == 4
    assert len(c.through(0)) == 2
    json.dumps(c.to_dict(domain("ring")))


@pytest.mark.parametrize("key", sorted(SHAPES))
def test_area_lemma_on_named_shapes(key):
    g = domain(key)
    q = patrol_region(g)
    assert check_area_lemma(domain_summary(g), crossings(q), q).passed


def test_area_lemma_rejects_3d():
    g = parse_domain("##\n\n##")
    q = patrol_region(g)
    with pytest.raises(DimensionUnsupported):
        check_area_lemma(domain_summary(g), crossings(q), q)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(0, 3), st.integers(0, 10_000))
def test_area_lemma_property(A, g, seed):
    try:
        dom = random_domain(A, g, seed)
    except Infeasible:
        return
    s = domain_summary(dom)
    assert s.A == A and s.holes_g == g and s.pinches == 0
    q = patrol_region(dom)
    assert check_area_lemma(s, crossings(q), q).passed
    # the patrol region and the closed plaques agree on pinch-free domains
    assert q.euler() == s.euler


def test_random_domain_is_deterministic():
    assert random_domain(20, 1, 3).cells == random_domain(20, 1, 3).cells


def test_random_domain_infeasible():
    with pytest.raises(Infeasible):
        random_domain(4, 1, 0)
