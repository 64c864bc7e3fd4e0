"""Labelings of a grid domain and canonical labels for every cell of the glued complex.

Agents are numbered 1..A+1. Cells of the domain are referred to by their index in
canonical (lexicographic) order, and every per-cell tuple is in that order.
Transposition positions are 1-based, as in :mod:`gridcov.permutahedron`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import Iterator, Optional

from ..errors import DomainTooSmall, MalformedDescriptor
from ..griddomain import GridDomain, crossings, patrol_region


@dataclass(frozen=True, order=True)
class Labeling:
    """A patroller plus a bijection from cells to the remaining agents."""

    patroller: int
    assignment: tuple

    @property
    def as_permutation(self) -> tuple:
        return (self.patroller,) + self.assignment

    def swapped_into(self, cell: int) -> "Labeling":
        """The labeling whose patroller is the agent pinned at ``cell`` and vice versa."""
        a = list(self.assignment)
        a[cell], p = self.patroller, a[cell]
        return Labeling(p, tuple(a))


def unrank_permutation(n: int, rank: int) -> tuple:
    items = list(range(1, n + 1))
    out = []
    for pos in range(n, 0, -1):
        f = factorial(pos - 1)
        q, rank = divmod(rank, f)
        out.append(items.pop(q))
    return tuple(out)


def rank_permutation(perm) -> int:
    items = sorted(perm)
    rank = 0
    n = len(perm)
    for pos, x in enumerate(perm):
        q = items.index(x)
        rank += q * factorial(n - 1 - pos)
        items.pop(q)
    return rank


def _next_permutation(p: list) -> bool:
    i = len(p) - 2
    while i >= 0 and p[i] >= p[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = len(p) - 1
    while p[j] <= p[i]:
        j -= 1
    p[i], p[j] = p[j], p[i]
    p[i + 1:] = reversed(p[i + 1:])
    return True


def enumerate_labelings(A: int, start: int = 0, stop: Optional[int] = None) -> Iterator[Labeling]:
    """All (A+1)! labelings in lexicographic order of (patroller, assignment).

    ``start``/``stop`` select a rank range so the stream can be split across workers.
    """
    if A < 2:
        raise DomainTooSmall(f"need at least 2 plaques, got {A}")
    total = factorial(A + 1)
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    p = list(unrank_permutation(A + 1, start))
    for _ in range(start, stop):
        yield Labeling(p[0], tuple(p[1:]))
        _next_permutation(p)


# -- canonical labels ------------------------------------------------------------------


class _Label:
    def to_json(self) -> dict:
        out = {"type": type(self).__name__}
        for k, v in self.__dict__.items():
            out[k] = _plain(v)
        return out


def _plain(v):
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v


@dataclass(frozen=True, order=True)
class OverlapVertex(_Label):
    """Per cell, the sorted agents on it; exactly one cell holds two agents."""

    sets: tuple


@dataclass(frozen=True, order=True)
class QEdge(_Label):
    assignment: tuple
    patroller: int
    cells: tuple


@dataclass(frozen=True, order=True)
class QSquare(_Label):
    assignment: tuple
    patroller: int
    cells: tuple


@dataclass(frozen=True, order=True)
class QCube(_Label):
    assignment: tuple
    patroller: int
    cells: tuple


@dataclass(frozen=True, order=True)
class PermVertex(_Label):
    crossing: int
    off: tuple  # agents on the off-crossing cells, in canonical cell order
    arrangement: tuple  # the agents along the crossing, in increasing coordinate order


@dataclass(frozen=True, order=True)
class HalfEdge(_Label):
    crossing: int
    off: tuple
    arrangement: tuple
    position: int


@dataclass(frozen=True, order=True)
class SwarmEdge(_Label):
    crossing: int
    off: tuple
    arrangement: tuple
    positions: tuple


@dataclass(frozen=True, order=True)
class Triangle(_Label):
    crossing: int
    off: tuple
    arrangement: tuple
    positions: tuple


class GluingContext:
    """Domain data the gluing rules need: patrol region, crossings, off-crossing cells."""

    def __init__(self, domain: GridDomain):
        if domain.A < 2:
            raise DomainTooSmall(f"need at least 2 plaques, got {domain.A}")
        self.domain = domain
        self.A = domain.A
        self.N = domain.A + 1
        self.patrol = patrol_region(domain)
        self.crossing_set = crossings(self.patrol)
        self.crossings = self.crossing_set.crossings

    @cached_property
    def off_cells(self) -> list:
        out = []
        for x in self.crossings:
            on = set(x.cells)
            out.append(tuple(c for c in range(self.A) if c not in on))
        return out

    def edge_index(self, a: int, b: int) -> int:
        return self.patrol.edge_index[(a, b) if a < b else (b, a)]

    # -- descriptor checks --

    def _check_labeling(self, labeling: Labeling):
        if not isinstance(labeling, Labeling):
            raise MalformedDescriptor("expected a Labeling")
        if len(labeling.assignment) != self.A:
            raise MalformedDescriptor("assignment length differs from the cell count")
        if sorted(labeling.as_permutation) != list(range(1, self.N + 1)):
            raise MalformedDescriptor("labeling is not a bijection onto the agents")

    def _check_perm(self, crossing, off, arrangement):
        if not 0 <= crossing < len(self.crossings):
            raise MalformedDescriptor(f"no crossing {crossing}")
        x = self.crossings[crossing]
        if len(arrangement) != x.length + 1 or len(off) != self.A - x.length:
            raise MalformedDescriptor("arrangement/off-crossing sizes do not fit the crossing")
        if sorted(tuple(off) + tuple(arrangement)) != list(range(1, self.N + 1)):
            raise MalformedDescriptor("agents are not a bijection onto [A+1]")
        return x

    def _placement(self, crossing, off, along) -> list:
        """Per-cell agents given the on-crossing agents ``along`` (one entry per cell)."""
        x = self.crossings[crossing]
        sets = [None] * self.A
        for c, agents in zip(x.cells, along):
            sets[c] = agents
        for c, a in zip(self.off_cells[crossing], off):
            sets[c] = (a,)
        return sets


def canonical_label(ctx: GluingContext, kind: str, **data):
    """Canonical label of a cell described by ``kind`` and its descriptor.

    Kinds: ``q_vertex`` (labeling, cell), ``q_edge`` (labeling, cells),
    ``q_square`` / ``q_cube`` (labeling, cells), ``perm_vertex`` (crossing, off,
    arrangement), ``midpoint`` (... , position), ``half_edge`` (..., position),
    ``single_shift`` / ``swarm_edge`` / ``triangle`` (..., positions).

    Identification rules: a patrol-region vertex and a permutahedron midpoint both
    become the OverlapVertex of the configuration they describe, and a single
    shift becomes the patrol-region edge along which the middle agent slides.
    """
    try:
        handler = _HANDLERS[kind]
    except KeyError:
        raise MalformedDescriptor(f"unknown cell kind {kind!r}") from None
    try:
        return handler(ctx, **data)
    except TypeError as exc:
        raise MalformedDescriptor(f"bad descriptor for {kind}: {exc}") from None


def _q_vertex(ctx, labeling, cell):
    ctx._check_labeling(labeling)
    if not 0 <= cell < ctx.A:
        raise MalformedDescriptor(f"no cell {cell}")
    sets = [(a,) for a in labeling.assignment]
    sets[cell] = tuple(sorted((labeling.assignment[cell], labeling.patroller)))
    return OverlapVertex(tuple(sets))


def _q_cells(ctx, labeling, cells, cls, size):
    ctx._check_labeling(labeling)
    cells = tuple(sorted(cells))
    if len(cells) != size or len(set(cells)) != size:
        raise MalformedDescriptor(f"{cls.__name__} needs {size} distinct cells")
    if cls is QEdge and cells not in ctx.patrol.edge_index:
        raise MalformedDescriptor(f"cells {cells} are not face-adjacent")
    return cls(labeling.assignment, labeling.patroller, cells)


def _perm_vertex(ctx, crossing, off, arrangement):
    ctx._check_perm(crossing, off, arrangement)
    return PermVertex(crossing, tuple(off), tuple(arrangement))


def _position(x, k, *, shift=False):
    hi = x.length - 1 if shift else x.length
    if not 1 <= k <= hi:
        raise MalformedDescriptor(f"position {k} out of range for a crossing of length {x.length}")


def _midpoint(ctx, crossing, off, arrangement, position):
    x = ctx._check_perm(crossing, off, arrangement)
    k = position
    _position(x, k)
    pi = arrangement
    along = [(pi[j],) for j in range(k - 1)]
    along.append(tuple(sorted((pi[k - 1], pi[k]))))
    along += [(pi[j],) for j in range(k + 1, x.length + 1)]
    return OverlapVertex(tuple(ctx._placement(crossing, off, along)))


def _half_edge(ctx, crossing, off, arrangement, position):
    x = ctx._check_perm(crossing, off, arrangement)
    _position(x, position)
    return HalfEdge(crossing, tuple(off), tuple(arrangement), position)


def _pair(x, positions):
    k, l = positions
    if not (1 <= k < l <= x.length):
        raise MalformedDescriptor(f"bad position pair {positions}")
    return k, l


def _single_shift(ctx, crossing, off, arrangement, positions):
    x = ctx._check_perm(crossing, off, arrangement)
    k, l = _pair(x, positions)
    if l != k + 1:
        raise MalformedDescriptor(f"positions {positions} describe a swarm shift")
    pi = arrangement
    along = [pi[j] for j in range(k)] + [pi[j] for j in range(k + 1, x.length + 1)]
    sets = ctx._placement(crossing, off, [(a,) for a in along])
    assignment = tuple(s[0] for s in sets)
    cells = tuple(sorted((x.cells[k - 1], x.cells[k])))
    return QEdge(assignment, pi[k], cells)


def _swarm_edge(ctx, crossing, off, arrangement, positions):
    x = ctx._check_perm(crossing, off, arrangement)
    k, l = _pair(x, positions)
    if l == k + 1:
        raise MalformedDescriptor(f"positions {positions} describe a single shift")
    return SwarmEdge(crossing, tuple(off), tuple(arrangement), (k, l))


def _triangle(ctx, crossing, off, arrangement, positions):
    x = ctx._check_perm(crossing, off, arrangement)
    k, l = _pair(x, positions)
    return Triangle(crossing, tuple(off), tuple(arrangement), (k, l))


_HANDLERS = {
    "q_vertex": _q_vertex,
    "q_edge": lambda ctx, labeling, cells: _q_cells(ctx, labeling, cells, QEdge, 2),
    "q_square": lambda ctx, labeling, cells: _q_cells(ctx, labeling, cells, QSquare, 4),
    "q_cube": lambda ctx, labeling, cells: _q_cells(ctx, labeling, cells, QCube, 8),
    "perm_vertex": _perm_vertex,
    "midpoint": _midpoint,
    "half_edge": _half_edge,
    "single_shift": _single_shift,
    "swarm_edge": _swarm_edge,
    "triangle": _triangle,
}
