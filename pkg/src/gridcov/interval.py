"""Covering the unit interval with n balls of radius r: excess number and skeleton model."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Optional, Union

from .cellcomplex import euler_characteristic
from .errors import NonpositiveRadius
from .homology import betti
from .permutahedron import k_skeleton

Rational = Union[Fraction, int, str]


def _as_fraction(r: Rational) -> Fraction:
    if isinstance(r, float):
        raise TypeError("radius must be exact (Fraction, int or 'p/q' string)")
    return Fraction(r)


def excess(n: int, r: Rational) -> Optional[int]:
    """k = n - ceil(1 / 2r), or None when the space is empty (k < 0)."""
    r = _as_fraction(r)
    if r <= 0:
        raise NonpositiveRadius(f"radius must be positive, got {r}")
    if n < 1:
        raise ValueError("need at least one ball")
    k = n - ceil(1 / (2 * r))
    return k if k >= 0 else None


@dataclass(frozen=True)
class IntervalModel:
    n: int
    r: Fraction
    k: Optional[int]
    counts: dict
    euler: Optional[int]
    betti: Optional[list]

    @property
    def empty(self) -> bool:
        return self.k is None

    @property
    def model(self) -> str:
        return "empty" if self.empty else f"Skel_{self.k}(Pi_{self.n - 1})"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r": f"{self.r.numerator}/{self.r.denominator}",
            "k": self.k,
            "model": self.model,
            "counts": {str(d): c for d, c in self.counts.items()},
            "euler": self.euler,
            "betti": self.betti,
        }


def interval_model(n: int, r: Rational) -> IntervalModel:
    r = _as_fraction(r)
    k = excess(n, r)
    if k is None:
        return IntervalModel(n, r, None, {}, None, None)
    lattice = k_skeleton(n, k)
    cx = lattice.to_complex()
    return IntervalModel(n, r, k, lattice.counts(), euler_characteristic(cx), betti(cx))
