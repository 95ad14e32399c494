"""Named schemes used by the command line and the acceptance suite."""

from __future__ import annotations

from .geometry import Domain, TranslationLattice
from .schemes import (
    Homomorphism,
    Scheme,
    lift_scheme,
    search_euclidean_scheme,
    z14_scheme,
    z139_scheme,
)


def chain_scheme() -> Scheme:
    """Thirteen sites ``[0, 12]``, workspace ``{0, 4, 8}``, base ``(1, 3, 9)``."""
    return Scheme(TranslationLattice(1), Domain.interval(0, 12), ((0,), (4,), (8,)), ((1,), (3,), (9,)))


def stride_scheme(stride: int, m: int, refs=(1, 3, 9)) -> Scheme:
    """``(stride Z, refs)`` on ``[-stride m, stride m]``."""
    D = Domain.interval(-stride * m, stride * m)
    P = tuple(x for x in D.points if x[0] % stride == 0)
    return Scheme(TranslationLattice(1), D, P, tuple((r,) for r in refs))


def column_scheme(s: int, modulus: int, refs, half_width: int, half_height: int) -> Scheme:
    """``(modulus Z x Z^{s-1}, refs on the first axis)`` on a box window."""
    lo = (-half_width,) + (-half_height,) * (s - 1)
    hi = (half_width,) + (half_height,) * (s - 1)
    D = Domain.box(lo, hi)
    P = tuple(x for x in D.points if x[0] % modulus == 0)
    R = tuple((r,) + (0,) * (s - 1) for r in refs)
    return Scheme(TranslationLattice(s), D, P, R)


def lifted_z14(m: int = 64) -> Scheme:
    scheme, _ = lift_scheme(Homomorphism.mod(14), z14_scheme(), [(1,), (3,), (7,)], TranslationLattice(1),
                            Domain.interval(-m, m))
    return scheme


def euclid_s2(size: int = 24, seed: int = 0, trials: int = 200):
    half = size // 2
    window = Domain.box((-half, -half), (size - half - 1, size - half - 1))
    return search_euclidean_scheme(2, window, 3, trials, seed)


BUILTINS = {
    "z14": "({0}, (1, 3, 7)) on Z_14",
    "z-139": "(4Z, {1, 3, 9}) on [-4m, 4m]",
    "z8-139": "(8Z, {1, 3, 9}) on [-8m, 8m]",
    "z14-lift": "(14Z, {1, 3, 7}) on [-m, m], lifted from Z_14",
    "zs-lifted": "(4Z x Z^{s-1}, {(1,0..), (3,0..), (9,0..)}) on a box",
    "zs8-lifted": "(8Z x Z^{s-1}, {(1,0..), (3,0..), (9,0..)}) on a box",
    "euclid-s2": "searched strict scheme for distances in Z^2",
    "chain": "[0, 12] with P = {0, 4, 8}, R = (1, 3, 9)",
    "shiftable-chain": "chain with the base at 4l + {1, 3, 9}; scheme view at l",
}


def builtin_scheme(name: str, m: int = 16, s: int = 2, seed: int = 0, size: int = 24, ell: int = 0,
                   stride: int = 4, n_logical: int = 3) -> Scheme:
    if name == "z14":
        return z14_scheme()
    if name == "z-139":
        return z139_scheme(m)
    if name == "z8-139":
        return stride_scheme(8, m)
    if name == "z14-lift":
        return lifted_z14(4 * m)
    if name in ("zs-lifted", "zs8-lifted"):
        return column_scheme(s, 4 if name == "zs-lifted" else 8, (1, 3, 9), m, max(2, m // 4))
    if name == "euclid-s2":
        res = euclid_s2(size, seed)
        if not res.found:
            raise LookupError("search found no strict scheme")
        return res.scheme
    if name == "chain":
        return chain_scheme()
    if name == "shiftable-chain":
        from .compiler.circuit import ShiftableChain

        return ShiftableChain(n_logical, stride, ell).scheme(ell)
    raise KeyError(f"unknown builtin scheme {name!r}; choose from {', '.join(BUILTINS)}")
