"""Lattice points, group models and orbit classes of ordered pairs.

Two group models are supported:

* ``TranslationLattice`` -- shifts of Z^s, optionally reduced modulo ``m`` on
  some axes.  The class of ``(p, q)`` is keyed by the offset ``p - q``.
* ``EuclideanIsometry`` -- isometries of R^s acting on integer points.  The
  class of ``(p, q)`` is keyed by the exact squared distance ``|p - q|^2``.

Only the orbit structure is modelled; group elements never appear.
"""

from __future__ import annotations

import itertools
import numbers
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

Point = tuple[int, ...]
OrbitKey = Union[tuple[int, ...], int]


class DiagonalPairError(ValueError):
    """Raised when a class is requested for a pair ``(p, p)``."""


def as_point(x) -> Point:
    if isinstance(x, numbers.Integral):
        return (int(x),)
    return tuple(int(c) for c in x)


@dataclass(frozen=True)
class TranslationLattice:
    """Translations of Z^s.  ``moduli[i]`` is ``None`` for an unbounded axis."""

    dim: int = 1
    moduli: tuple[int | None, ...] | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if self.moduli is None:
            object.__setattr__(self, "moduli", (None,) * self.dim)
        if len(self.moduli) != self.dim:
            raise ValueError("one modulus entry per axis")
        for m in self.moduli:
            if m is not None and m < 2:
                raise ValueError("modulus must be >= 2")

    symmetric = False

    def reduce(self, v: Sequence[int]) -> Point:
        return tuple(c if m is None else c % m for c, m in zip(v, self.moduli))

    def sub(self, p: Point, q: Point) -> Point:
        return self.reduce([a - b for a, b in zip(p, q)])

    def add(self, p: Point, q: Point) -> Point:
        return self.reduce([a + b for a, b in zip(p, q)])

    def neg(self, p: Point) -> Point:
        return self.reduce([-a for a in p])

    def scale(self, k: int, p: Point) -> Point:
        return self.reduce([k * a for a in p])

    def key(self, p: Point, q: Point) -> OrbitKey:
        return self.sub(p, q)

    def is_diagonal_key(self, key: OrbitKey) -> bool:
        return all(c == 0 for c in key)

    def swapped(self, key: OrbitKey) -> OrbitKey:
        return self.neg(key)

    def to_json(self) -> dict:
        return {"kind": "translation", "dim": self.dim, "moduli": list(self.moduli)}


@dataclass(frozen=True)
class EuclideanIsometry:
    """Isometries of R^s restricted to integer points; classes are distances."""

    dim: int = 2

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")

    symmetric = True

    def key(self, p: Point, q: Point) -> OrbitKey:
        return sum((a - b) ** 2 for a, b in zip(p, q))

    def is_diagonal_key(self, key: OrbitKey) -> bool:
        return key == 0

    def swapped(self, key: OrbitKey) -> OrbitKey:
        return key

    def to_json(self) -> dict:
        return {"kind": "euclidean", "dim": self.dim}


GroupModel = Union[TranslationLattice, EuclideanIsometry]


def model_from_json(d: dict) -> GroupModel:
    kind = d.get("kind")
    if kind == "translation":
        moduli = d.get("moduli")
        return TranslationLattice(int(d.get("dim", 1)), None if moduli is None else tuple(moduli))
    if kind == "euclidean":
        return EuclideanIsometry(int(d.get("dim", 2)))
    raise ValueError(f"unknown group model kind {kind!r}")


@dataclass(frozen=True)
class Domain:
    """Finite point set in canonical (lexicographic) order.

    Qubit ``i`` of a state vector sits at ``points[i]``.
    """

    points: tuple[Point, ...]
    index_of: dict = field(compare=False, repr=False, hash=False, default=None)

    def __post_init__(self):
        pts = tuple(sorted(set(self.points)))
        if len(pts) != len(self.points):
            raise ValueError("domain points must be distinct")
        if not pts:
            raise ValueError("domain must be non-empty")
        dims = {len(p) for p in pts}
        if len(dims) != 1:
            raise ValueError("all points must have the same dimension")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "index_of", {p: i for i, p in enumerate(pts)})

    @classmethod
    def from_points(cls, pts: Iterable) -> "Domain":
        return cls(tuple(as_point(p) for p in pts))

    @classmethod
    def box(cls, lo: Sequence[int], hi: Sequence[int]) -> "Domain":
        """All integer points with ``lo[i] <= x[i] <= hi[i]`` (inclusive)."""
        ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
        return cls(tuple(itertools.product(*ranges)))

    @classmethod
    def interval(cls, lo: int, hi: int) -> "Domain":
        return cls.box((lo,), (hi,))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p) -> bool:
        return as_point(p) in self.index_of

    def index(self, p) -> int:
        return self.index_of[as_point(p)]

    def restrict(self, pts: Iterable) -> "Domain":
        keep = {as_point(p) for p in pts}
        return Domain(tuple(p for p in self.points if p in keep))


def class_of(model: GroupModel, p, q) -> OrbitKey:
    """Canonical key of the orbit class containing the ordered pair ``(p, q)``."""
    p, q = as_point(p), as_point(q)
    key = model.key(p, q)
    if model.is_diagonal_key(key):
        raise DiagonalPairError(f"pair ({p}, {q}) lies on the diagonal")
    return key


def normalize_key(model: GroupModel, key) -> OrbitKey:
    if isinstance(model, EuclideanIsometry):
        return int(key)
    return model.reduce(as_point(key))


def class_members(model: GroupModel, domain: Domain, key) -> list[tuple[Point, Point]]:
    """Ordered pairs of ``domain`` in class ``key``, in canonical order."""
    key = normalize_key(model, key)
    out = []
    for p in domain.points:
        for q in domain.points:
            if p != q and model.key(p, q) == key:
                out.append((p, q))
    return out


def neighbors_in_class(model: GroupModel, domain: Domain, key, p, support) -> list[Point]:
    """Points ``q`` of ``support`` with ``(p, q)`` or ``(q, p)`` in class ``key``."""
    key = normalize_key(model, key)
    p = as_point(p)
    out = []
    for q in support:
        q = as_point(q)
        if q == p:
            continue
        if model.key(p, q) == key or model.key(q, p) == key:
            out.append(q)
    return sorted(out)


def all_keys(model: GroupModel, domain: Domain) -> list[OrbitKey]:
    """Every non-diagonal class realised by a pair of ``domain``."""
    keys = {model.key(p, q) for p in domain.points for q in domain.points if p != q}
    return sorted(keys)
