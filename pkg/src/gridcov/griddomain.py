"""Grid domains: parsing, cubical topology, free patrolling region and crossings."""
from __future__ import annotations

import itertools
import json
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import (
    DimensionUnsupported,
    Disconnected,
    EmptyDomain,
    Infeasible,
    MalformedInput,
)

Cell = tuple


def _face_neighbors(cell: Cell):
    for axis in range(len(cell)):
        for step in (-1, 1):
            nb = list(cell)
            nb[axis] += step
            yield tuple(nb)


def _components(cells: Iterable[Cell]) -> list[list[Cell]]:
    remaining = set(cells)
    comps = []
    for start in sorted(remaining):
        if start not in remaining:
            continue
        remaining.discard(start)
        comp = [start]
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            for nb in _face_neighbors(cur):
                if nb in remaining:
                    remaining.discard(nb)
                    comp.append(nb)
                    queue.append(nb)
        comps.append(sorted(comp))
    return comps


@dataclass(frozen=True)
class GridDomain:
    """A face-connected set of unit cells in Z^2 or Z^3.

    Cells are normalized so the bounding box starts at the origin and are kept
    in lexicographic order; ``index`` gives each cell's position in that order.
    """

    dim: int
    cells: tuple
    name: Optional[str] = None
    index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {c: i for i, c in enumerate(self.cells)})

    @classmethod
    def from_cells(cls, cells: Iterable, name: Optional[str] = None, dim: Optional[int] = None):
        cells = [tuple(int(x) for x in c) for c in cells]
        if not cells:
            raise EmptyDomain("domain has no cells")
        arity = {len(c) for c in cells}
        if len(arity) != 1:
            raise MalformedInput("cells have mixed coordinate arity")
        d = arity.pop()
        if dim is not None and dim != d:
            raise MalformedInput(f"declared dim {dim} but cells have arity {d}")
        if d not in (2, 3):
            raise MalformedInput(f"dimension must be 2 or 3, got {d}")
        if len(set(cells)) != len(cells):
            raise MalformedInput("duplicate cells")
        lo = [min(c[a] for c in cells) for a in range(d)]
        norm = sorted(tuple(c[a] - lo[a] for a in range(d)) for c in cells)
        comps = _components(norm)
        if len(comps) > 1:
            raise Disconnected(comps)
        return cls(d, tuple(norm), name)

    @property
    def A(self) -> int:
        return len(self.cells)

    @property
    def shape(self) -> tuple:
        return tuple(max(c[a] for c in self.cells) + 1 for a in range(self.dim))

    def __contains__(self, cell) -> bool:
        return cell in self.index


# -- parsing / serialization -------------------------------------------------


def parse_domain(text: str, name: Optional[str] = None) -> GridDomain:
    """Parse the ASCII '#'/'.' format (3D layers split by one blank line) or JSON."""
    stripped = text.strip()
    if not stripped:
        raise EmptyDomain("empty input")
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
        if not isinstance(data, dict) or "cells" not in data:
            raise MalformedInput("JSON domain needs a 'cells' list")
        try:
            cells = [tuple(c) for c in data["cells"]]
        except TypeError:
            raise MalformedInput("cells must be coordinate lists") from None
        return GridDomain.from_cells(cells, name=data.get("name", name), dim=data.get("dim"))

    lines = text.split("\n")
    while lines and lines[-1].strip() == "":
        lines.pop()
    while lines and lines[0].strip() == "":
        lines.pop(0)
    layers: list[list[tuple[int, str]]] = [[]]
    blank_run = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r")
        if line.strip() == "":
            blank_run += 1
            if blank_run > 1:
                raise MalformedInput("layers must be separated by exactly one blank line", lineno)
            layers.append([])
            continue
        blank_run = 0
        for col, ch in enumerate(line, start=1):
            if ch not in "#.":
                raise MalformedInput(f"unexpected character {ch!r}", lineno, col)
        layers[-1].append((lineno, line))

    width = len(layers[0][0][1])
    height = len(layers[0])
    for layer in layers:
        if len(layer) != height and len(layers) > 1:
            raise MalformedInput("3D layers must have the same number of rows", layer[0][0])
        for lineno, line in layer:
            if len(line) != width:
                raise MalformedInput(f"line length {len(line)} differs from {width}", lineno)

    cells = []
    for z, layer in enumerate(layers):
        for r, (_, line) in enumerate(layer):
            for c, ch in enumerate(line):
                if ch == "#":
                    cells.append((z, r, c) if len(layers) > 1 else (r, c))
    if not cells:
        raise EmptyDomain("no '#' plaques in input")
    return GridDomain.from_cells(cells, name=name)


def serialize_domain(g: GridDomain, fmt: str = "ascii") -> str:
    if fmt == "json":
        payload = {"dim": g.dim, "cells": [list(c) for c in g.cells]}
        if g.name:
            payload["name"] = g.name
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    if fmt != "ascii":
        raise ValueError(f"unknown format {fmt!r}")
    shape = g.shape
    if g.dim == 2:
        blocks = [[(r, c) for c in range(shape[1])] for r in range(shape[0])]
        rows = ["".join("#" if cell in g else "." for cell in row) for row in blocks]
        return "\n".join(rows) + "\n"
    layers = []
    for z in range(shape[0]):
        rows = [
            "".join("#" if (z, r, c) in g else "." for c in range(shape[2]))
            for r in range(shape[1])
        ]
        layers.append("\n".join(rows))
    return "\n\n".join(layers) + "\n"


# -- topology of the domain --------------------------------------------------


def cubical_face_counts(g: GridDomain) -> list[int]:
    """Face counts (vertices, edges, squares[, cubes]) of the union of closed plaques."""
    faces = [set() for _ in range(g.dim + 1)]
    axes = range(g.dim)
    for cell in g.cells:
        for k in range(g.dim + 1):
            for free in itertools.combinations(axes, k):
                fixed = [a for a in axes if a not in free]
                for offs in itertools.product((0, 1), repeat=len(fixed)):
                    base = list(cell)
                    for a, o in zip(fixed, offs):
                        base[a] += o
                    faces[k].add((tuple(base), free))
    return [len(f) for f in faces]


def count_pinches(g: GridDomain) -> int:
    """Pairs of cells that touch in a lower-dimensional face but are not
    face-connected inside their common 2x2(x2) block.

    On pinch-free domains the closed-plaque Euler characteristic equals the
    Euler characteristic of the patrol region.
    """
    cells = g.index
    pinches = 0
    if g.dim == 2:
        for (r, c) in g.cells:
            for dc in (-1, 1):
                b = (r + 1, c + dc)
                if b in cells and (r + 1, c) not in cells and (r, c + dc) not in cells:
                    pinches += 1
        return pinches
    for a in g.cells:
        for delta in itertools.product((-1, 0, 1), repeat=g.dim):
            if sum(1 for x in delta if x) < 2:
                continue
            b = tuple(x + y for x, y in zip(a, delta))
            if b not in cells or b < a:
                continue
            lo = [min(x, y) for x, y in zip(a, b)]
            hi = [max(x, y) for x, y in zip(a, b)]
            block = [
                c for c in itertools.product(*[range(l, h + 1) for l, h in zip(lo, hi)])
                if c in cells
            ]
            comp = next(c for c in _components(block) if a in c)
            if b not in comp:
                pinches += 1
    return pinches


@dataclass(frozen=True)
class DomainSummary:
    A: int
    euler: int
    holes_g: Optional[int]
    bbox: tuple
    dim: int = 2
    pinches: int = 0

    def to_dict(self) -> dict:
        return {
            "A": self.A,
            "euler": self.euler,
            "holes": self.holes_g,
            "bbox": [list(self.bbox[0]), list(self.bbox[1])],
            "dim": self.dim,
            "pinches": self.pinches,
        }


def domain_summary(g: GridDomain) -> DomainSummary:
    counts = cubical_face_counts(g)
    euler = sum((-1) ** k * n for k, n in enumerate(counts))
    holes = 1 - euler if g.dim == 2 else None
    bbox = (tuple(0 for _ in range(g.dim)), tuple(s - 1 for s in g.shape))
    return DomainSummary(g.A, euler, holes, bbox, g.dim, count_pinches(g))


# -- free patrolling region --------------------------------------------------


@dataclass(frozen=True)
class Square:
    """A 2x2 block of plaques; ``cells`` and ``edges`` are in cyclic order."""

    axes: tuple
    cells: tuple
    edges: tuple


@dataclass(frozen=True)
class CubeCell:
    cells: tuple
    squares: tuple


@dataclass(frozen=True)
class PatrolRegion:
    """The complex Q on plaque centers; all entries are cell indices of ``domain``."""

    domain: GridDomain
    edges: tuple
    squares: tuple
    cubes: tuple
    edge_index: dict = field(repr=False, compare=False, hash=False)

    @property
    def vertices(self) -> tuple:
        return self.domain.cells

    @property
    def K(self) -> int:
        return len(self.squares)

    def face_counts(self) -> list[int]:
        counts = [len(self.vertices), len(self.edges), len(self.squares)]
        if self.domain.dim == 3:
            counts.append(len(self.cubes))
        return counts

    def euler(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.face_counts()))


def patrol_region(g: GridDomain) -> PatrolRegion:
    idx = g.index
    edges = []
    for i, cell in enumerate(g.cells):
        for axis in range(g.dim):
            nb = list(cell)
            nb[axis] += 1
            j = idx.get(tuple(nb))
            if j is not None:
                edges.append((i, j))
    edges.sort()
    edge_index = {e: k for k, e in enumerate(edges)}

    def eid(a, b):
        return edge_index[(a, b) if a < b else (b, a)]

    squares = []
    square_index = {}
    for cell in g.cells:
        for ax in itertools.combinations(range(g.dim), 2):
            corners = []
            for da, db in ((0, 0), (0, 1), (1, 1), (1, 0)):
                c = list(cell)
                c[ax[0]] += da
                c[ax[1]] += db
                corners.append(idx.get(tuple(c)))
            if None in corners:
                continue
            cyc = tuple(corners)
            sq_edges = tuple(eid(cyc[k], cyc[(k + 1) % 4]) for k in range(4))
            square_index[frozenset(cyc)] = len(squares)
            squares.append(Square(ax, cyc, sq_edges))

    cubes = []
    if g.dim == 3:
        for cell in g.cells:
            corner_cells = []
            for off in itertools.product((0, 1), repeat=3):
                c = tuple(x + o for x, o in zip(cell, off))
                corner_cells.append(idx.get(c))
            if None in corner_cells:
                continue
            faces = []
            for axis in range(3):
                for side in (0, 1):
                    members = frozenset(
                        corner_cells[k]
                        for k, off in enumerate(itertools.product((0, 1), repeat=3))
                        if off[axis] == side
                    )
                    faces.append(square_index[members])
            cubes.append(CubeCell(tuple(corner_cells), tuple(sorted(faces))))
    return PatrolRegion(g, tuple(edges), tuple(squares), tuple(cubes), edge_index)


# -- crossings ---------------------------------------------------------------


@dataclass(frozen=True)
class Crossing:
    axis: int
    cells: tuple  # cell indices in increasing coordinate order along ``axis``

    @property
    def length(self) -> int:
        return len(self.cells)

    @property
    def degenerate(self) -> bool:
        return len(self.cells) == 1


@dataclass(frozen=True)
class CrossingSet:
    crossings: tuple
    dim: int

    def histogram(self, axis: Optional[int] = None, include_degenerate: bool = True) -> dict:
        hist = Counter(
            c.length for c in self.crossings
            if (axis is None or c.axis == axis) and (include_degenerate or not c.degenerate)
        )
        return dict(sorted(hist.items()))

    def nondegenerate(self) -> tuple:
        return tuple(c for c in self.crossings if not c.degenerate)

    def through(self, cell_index: int) -> list:
        return [c for c in self.crossings if cell_index in c.cells]

    def to_dict(self, domain: GridDomain) -> dict:
        return {
            "histogram": {str(k): v for k, v in self.histogram().items()},
            "by_axis": {
                str(a): {str(k): v for k, v in self.histogram(a).items()} for a in range(self.dim)
            },
            "crossings": [
                {
                    "axis": c.axis,
                    "cells": [list(domain.cells[i]) for i in c.cells],
                    "degenerate": c.degenerate,
                }
                for c in self.crossings
            ],
        }


def crossings(q: PatrolRegion) -> CrossingSet:
    g = q.domain
    out = []
    for axis in range(g.dim):
        for i, cell in enumerate(g.cells):
            prev = list(cell)
            prev[axis] -= 1
            if tuple(prev) in g:
                continue  # not the start of a run
            run = [i]
            nxt = list(cell)
            while True:
                nxt[axis] += 1
                j = g.index.get(tuple(nxt))
                if j is None:
                    break
                run.append(j)
            out.append(Crossing(axis, tuple(run)))
    return CrossingSet(tuple(out), g.dim)


# -- area lemma --------------------------------------------------------------


@dataclass(frozen=True)
class AreaLemmaReport:
    K: int
    A: int
    crossing_sum: int
    g: int
    lhs: int
    rhs: int

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "A": self.A,
            "crossing_sum": self.crossing_sum,
            "g": self.g,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "pass": self.passed,
        }


def check_area_lemma(s: DomainSummary, c: CrossingSet, q: PatrolRegion) -> AreaLemmaReport:
    """Check K = 1 - A + sum_i n_i (i - 1) - g."""
    if s.dim != 2 or c.dim != 2:
        raise DimensionUnsupported("the area identity is stated for 2D domains")
    total = sum(n * (i - 1) for i, n in c.histogram().items())
    rhs = 1 - s.A + total - s.holes_g
    return AreaLemmaReport(q.K, s.A, total, s.holes_g, q.K, rhs)


# -- random domains ----------------------------------------------------------


def _creates_pinch(cells: set, new: Cell) -> bool:
    r, c = new
    for dr, dc in ((-1, -1), (-1, 1), (1, -1), (1, 1)):
        diag = (r + dr, c + dc)
        if diag in cells and (r + dr, c) not in cells and (r, c + dc) not in cells:
            return True
    return False


def _encloses(cells: set, new: Cell) -> bool:
    """Would adding ``new`` change the Euler characteristic (i.e. close a hole)?

    Only valid when the addition is face-adjacent and creates no pinch.
    """
    r, c = new
    new_edges = sum(1 for nb in _face_neighbors(new) if nb in cells)
    new_squares = 0
    for dr, dc in ((-1, -1), (-1, 1), (1, -1), (1, 1)):
        if (r + dr, c) in cells and (r, c + dc) in cells and (r + dr, c + dc) in cells:
            new_squares += 1
    return 1 - new_edges + new_squares != 0


def _grow(rng: random.Random, size: int, compact: float) -> set:
    cells = {(0, 0)}
    while len(cells) < size:
        frontier = sorted({nb for x in cells for nb in _face_neighbors(x)} - cells)
        options = [
            nb for nb in frontier if not _creates_pinch(cells, nb) and not _encloses(cells, nb)
        ]
        weights = [
            (1 + sum(1 for m in _face_neighbors(nb) if m in cells)) ** compact for nb in options
        ]
        cells.add(rng.choices(options, weights=weights)[0])
    return cells


def random_domain(A: int, g: int = 0, seed: int = 0, max_tries: int = 200) -> GridDomain:
    """Random pinch-free 2D polyomino with ``A`` cells and ``g`` unit holes.

    Contractible shapes are grown one face-adjacent plaque at a time, refusing
    moves that would enclose a hole or touch an existing plaque only at a
    corner. Holes are punched at plaques whose eight neighbours are present.
    """
    if A < 1 or g < 0:
        raise Infeasible(f"need A >= 1 and g >= 0 (got A={A}, g={g})")
    if g > 0 and A < 8 * g - max(0, (g - 1) * 3):
        raise Infeasible(f"A={A} cannot host {g} interior holes")
    rng = random.Random(seed)
    for attempt in range(max_tries):
        compact = 0.5 if g == 0 else 2.0 + attempt * 0.1
        cells = _grow(rng, A + g, compact)
        holes = 0
        for _ in range(g):
            interior = [
                x for x in sorted(cells)
                if all(
                    (x[0] + dr, x[1] + dc) in cells
                    for dr in (-1, 0, 1) for dc in (-1, 0, 1)
                )
            ]
            if not interior:
                break
            cells.discard(rng.choice(interior))
            holes += 1
        if holes == g:
            return GridDomain.from_cells(cells, name=f"random-A{A}-g{g}-s{seed}")
    raise Infeasible(f"could not place {g} holes in a {A}-cell domain")
