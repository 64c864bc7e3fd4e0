"""Graded cell store with boundary incidence, class tags and canonical labels.

Identifiers are per dimension: the d-cells of a sealed complex are numbered
0..n_d-1. Boundaries are kept in CSR form (``ptr[d]``, ``idx[d]``) so large
complexes can be handled with vectorized numpy code.
"""
from __future__ import annotations

import io
import json
import struct
from enum import IntEnum
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import BadBoundaryDimension, UnknownBoundaryId

SCHEMA_VERSION = 1
MAGIC = b"GRIDCOV\x01"


class Kind(IntEnum):
    OVERLAP_VERTEX = 0
    PERM_VERTEX = 1
    MIDPOINT = 2
    Q_EDGE = 3
    HALF_EDGE = 4
    SWARM_EDGE = 5
    SINGLE_EDGE = 6
    SQUARE = 7
    TRIANGLE = 8
    CUBE = 9
    OTHER = 10

    @property
    def title(self) -> str:
        return _TITLES[self]


_TITLES = {
    Kind.OVERLAP_VERTEX: "OverlapVertex",
    Kind.PERM_VERTEX: "PermVertex",
    Kind.MIDPOINT: "Midpoint",
    Kind.Q_EDGE: "QEdge",
    Kind.HALF_EDGE: "HalfEdge",
    Kind.SWARM_EDGE: "SwarmEdge",
    Kind.SINGLE_EDGE: "SingleEdge",
    Kind.SQUARE: "Square",
    Kind.TRIANGLE: "Triangle",
    Kind.CUBE: "Cube",
    Kind.OTHER: "Other",
}


class CellComplex:
    """Append-only store of cells; call :meth:`seal` before analysis.

    ``add_cell`` deduplicates on the canonical label: inserting a label that is
    already present returns the existing identifier (after checking that the
    dimension and boundary agree).
    """

    def __init__(self):
        self._sealed = False
        self._bnd: list[list[tuple]] = []
        self._kinds: list[list[int]] = []
        self._labels: list[list] = []
        self._index: dict = {}
        self.ptr: list[np.ndarray] = []
        self.idx: list[np.ndarray] = []
        self.kind: list[np.ndarray] = []
        self._label_fn: Optional[Callable[[int, int], object]] = None
        self.meta: dict = {}

    # -- construction ----------------------------------------------------------

    def add_cell(self, dim: int, boundary: Sequence[int], label, kind: Kind = Kind.OTHER) -> int:
        if self._sealed:
            raise RuntimeError("complex is sealed")
        if dim < 0 or dim > len(self._bnd):
            raise BadBoundaryDimension(f"no {dim - 1}-cells exist to bound a {dim}-cell")
        if dim == len(self._bnd):
            self._bnd.append([])
            self._kinds.append([])
            self._labels.append([])
        boundary = tuple(int(b) for b in boundary)
        if dim == 0 and boundary:
            raise BadBoundaryDimension("vertices have empty boundary")
        if dim > 0:
            if not boundary:
                raise BadBoundaryDimension(f"{dim}-cell needs a boundary")
            for b in boundary:
                if not 0 <= b < len(self._bnd[dim - 1]):
                    raise UnknownBoundaryId(f"no {dim - 1}-cell with id {b}")
        found = self._index.get(label)
        if found is not None:
            d, i = found
            if d != dim:
                raise BadBoundaryDimension(
                    f"label {label!r} already names a {d}-cell, not a {dim}-cell"
                )
            if sorted(self._bnd[dim][i]) != sorted(boundary):
                raise ValueError(f"label {label!r} re-inserted with a different boundary")
            return i
        i = len(self._bnd[dim])
        self._bnd[dim].append(boundary)
        self._kinds[dim].append(int(kind))
        self._labels[dim].append(label)
        self._index[label] = (dim, i)
        return i

    def add_boundary_checked(self, dim, boundary, label, kind=Kind.OTHER) -> int:
        """Like :meth:`add_cell` but reports a boundary id of the wrong dimension.

        ``boundary`` holds ``(dim, id)`` pairs.
        """
        for d, _ in boundary:
            if d != dim - 1:
                raise BadBoundaryDimension(f"{dim}-cell boundary contains a {d}-cell")
        return self.add_cell(dim, [i for _, i in boundary], label, kind)

    def seal(self) -> "CellComplex":
        if self._sealed:
            return self
        for d in range(len(self._bnd)):
            rows = self._bnd[d]
            lengths = np.fromiter((len(r) for r in rows), dtype=np.int64, count=len(rows))
            ptr = np.zeros(len(rows) + 1, dtype=np.int64)
            np.cumsum(lengths, out=ptr[1:])
            idx = np.fromiter(
                (b for r in rows for b in r), dtype=np.int32, count=int(ptr[-1])
            )
            self.ptr.append(ptr)
            self.idx.append(idx)
            self.kind.append(np.asarray(self._kinds[d], dtype=np.uint8))
        self._bnd = None
        self._kinds = None
        self._sealed = True
        return self

    @classmethod
    def from_arrays(cls, kinds, ptrs, idxs, label_fn=None, meta=None) -> "CellComplex":
        """Bulk constructor: ``kinds[d]``, ``ptrs[d]``, ``idxs[d]`` per dimension."""
        cx = cls()
        cx.kind = [np.asarray(k, dtype=np.uint8) for k in kinds]
        cx.ptr = [np.asarray(p, dtype=np.int64) for p in ptrs]
        cx.idx = [np.asarray(i, dtype=np.int32) for i in idxs]
        cx._labels = None
        cx._index = None
        cx._bnd = None
        cx._kinds = None
        cx._label_fn = label_fn
        cx.meta = dict(meta or {})
        cx._sealed = True
        return cx

    # -- access -------------------------------------------------------------------

    @property
    def sealed(self) -> bool:
        return self._sealed

    @property
    def dim(self) -> int:
        return len(self.kind) - 1

    def n(self, d: int) -> int:
        return len(self.kind[d]) if d < len(self.kind) else 0

    def counts(self) -> list[int]:
        return [len(k) for k in self.kind]

    def total_cells(self) -> int:
        return sum(self.counts())

    def boundary(self, d: int, i: int) -> np.ndarray:
        return self.idx[d][self.ptr[d][i]:self.ptr[d][i + 1]]

    def label(self, d: int, i: int):
        if self._labels is not None:
            return self._labels[d][i]
        if self._label_fn is None:
            return (d, i)
        return self._label_fn(d, i)

    def labels(self, d: int) -> list:
        return [self.label(d, i) for i in range(self.n(d))]

    def find(self, label) -> Optional[tuple]:
        if self._index is None:
            return None
        return self._index.get(label)

    def count_by_kind(self) -> dict:
        out = {}
        for k in self.kind:
            for value, n in zip(*np.unique(k, return_counts=True)):
                out[Kind(int(value)).title] = out.get(Kind(int(value)).title, 0) + int(n)
        return out

    def uniform(self, d: int, mask=None):
        """Cells of dimension ``d`` selected by ``mask`` as (ids, boundary matrix).

        All selected cells must have the same boundary size.
        """
        ids = np.arange(self.n(d)) if mask is None else np.flatnonzero(mask)
        if len(ids) == 0:
            return ids, np.zeros((0, 0), dtype=np.int32)
        lengths = self.ptr[d][ids + 1] - self.ptr[d][ids]
        k = int(lengths[0])
        if np.any(lengths != k):
            raise ValueError("selected cells have mixed boundary sizes")
        starts = self.ptr[d][ids]
        if len(ids) == self.n(d) and np.all(np.diff(self.ptr[d]) == k):
            return ids, self.idx[d].reshape(-1, k)
        gather = starts[:, None] + np.arange(k)[None, :]
        return ids, self.idx[d][gather]

    def incidence(self, d: int):
        """(cell ids, face ids) pairs for all boundary incidences of d-cells."""
        lengths = np.diff(self.ptr[d])
        cells = np.repeat(np.arange(self.n(d), dtype=np.int64), lengths)
        return cells, self.idx[d].astype(np.int64)

    def cofaces_count(self, d: int, mask=None) -> np.ndarray:
        """Number of d-cells (optionally masked) containing each (d-1)-cell."""
        if mask is None:
            return np.bincount(self.idx[d], minlength=self.n(d - 1))
        cells, faces = self.incidence(d)
        keep = mask[cells]
        return np.bincount(faces[keep], minlength=self.n(d - 1))

    # -- serialization ----------------------------------------------------------------

    def to_json(self, include_labels: bool = True) -> str:
        cells = {}
        for d in range(self.dim + 1):
            entries = []
            for i in range(self.n(d)):
                entry = {"id": i, "kind": Kind(int(self.kind[d][i])).title}
                if d:
                    entry["boundary"] = [int(b) for b in self.boundary(d, i)]
                if include_labels:
                    entry["label"] = _jsonable(self.label(d, i))
                entries.append(entry)
            cells[str(d)] = entries
        payload = {"schema_version": SCHEMA_VERSION, "meta": self.meta, "cells": cells}
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def to_bytes(self) -> bytes:
        """Binary form: magic, header length, JSON header, then raw little-endian arrays."""
        arrays = []
        for d in range(self.dim + 1):
            arrays.append((f"kind{d}", self.kind[d].astype("<u1")))
            if d:
                arrays.append((f"ptr{d}", self.ptr[d].astype("<i8")))
                arrays.append((f"idx{d}", self.idx[d].astype("<i4")))
        offset = 0
        layout = []
        for name, arr in arrays:
            layout.append({"name": name, "dtype": arr.dtype.str, "count": int(arr.size),
                           "offset": offset})
            offset += arr.nbytes
        header = json.dumps(
            {"schema_version": SCHEMA_VERSION, "dim": self.dim, "counts": self.counts(),
             "meta": self.meta, "arrays": layout},
            sort_keys=True, separators=(",", ":"),
        ).encode()
        buf = io.BytesIO()
        buf.write(MAGIC)
        buf.write(struct.pack("<Q", len(header)))
        buf.write(header)
        for _, arr in arrays:
            buf.write(arr.tobytes())
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "CellComplex":
        if data[:8] != MAGIC:
            raise ValueError("not a gridcov complex")
        (hlen,) = struct.unpack("<Q", data[8:16])
        header = json.loads(data[16:16 + hlen])
        base = 16 + hlen
        arrays = {}
        for spec in header["arrays"]:
            dt = np.dtype(spec["dtype"])
            start = base + spec["offset"]
            arrays[spec["name"]] = np.frombuffer(
                data, dtype=dt, count=spec["count"], offset=start
            ).copy()
        dim = header["dim"]
        kinds = [arrays[f"kind{d}"] for d in range(dim + 1)]
        ptrs = [np.zeros(len(kinds[0]) + 1, dtype=np.int64)]
        idxs = [np.zeros(0, dtype=np.int32)]
        for d in range(1, dim + 1):
            ptrs.append(arrays[f"ptr{d}"])
            idxs.append(arrays[f"idx{d}"])
        return cls.from_arrays(kinds, ptrs, idxs, meta=header.get("meta"))


def _jsonable(obj):
    if isinstance(obj, (tuple, list)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(_jsonable(x) for x in obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def euler_characteristic(c: CellComplex) -> int:
    return sum((-1) ** d * n for d, n in enumerate(c.counts()))
