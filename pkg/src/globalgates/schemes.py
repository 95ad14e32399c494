"""Workspace-base schemes and exhaustive addressability certificates.

A scheme ``(P, R)`` lives on a finite window ``D``.  Infinite constructions
such as ``(4Z, {1, 3, 9})`` are materialised on a window; a certificate is a
statement about that window only.

The fast checker enumerates, for every candidate ``p'`` in ``D``, the sets

    S_i(p') = {r' in P u R : (p', r') or (r', p') in class C(p, r_i)}

and tests the conclusion on them, which costs ``|D| * k * |P u R|`` rather
than ``|D| * |P u R|^k``.  The naive tuple enumeration is kept as an oracle.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .geometry import (
    Domain,
    EuclideanIsometry,
    GroupModel,
    Point,
    TranslationLattice,
    as_point,
    class_of,
    model_from_json,
)


class SchemeError(ValueError):
    pass


class LiftRefused(SchemeError):
    pass


class PreconditionError(SchemeError):
    """A named hypothesis of a construction does not hold."""

    def __init__(self, message: str, violated: Sequence[str] = ()):
        super().__init__(message)
        self.violated = list(violated)


@dataclass(frozen=True)
class Scheme:
    model: GroupModel
    domain: Domain
    P: tuple[Point, ...]
    R: tuple[Point, ...]

    def __post_init__(self):
        P = tuple(sorted({as_point(p) for p in self.P}))
        R = tuple(as_point(r) for r in self.R)
        if len(set(R)) != len(R):
            raise SchemeError("base points must be distinct")
        if set(P) & set(R):
            raise SchemeError("workspace and base must be disjoint")
        for x in P + R:
            if x not in self.domain:
                raise SchemeError(f"point {x} lies outside the window")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "R", R)

    @property
    def support(self) -> tuple[Point, ...]:
        return tuple(sorted(set(self.P) | set(self.R)))

    @property
    def k(self) -> int:
        return len(self.R)

    def density(self) -> float:
        return len(self.P) / self.domain.n

    def admits(self, bits: dict) -> bool:
        """True iff the 0/1 assignment ``bits`` (point -> bit) is admissible."""
        Rs, Ps = set(self.R), set(self.P)
        for x in self.domain:
            b = bits.get(x, 0)
            if x in Rs and b != 1:
                return False
            if x not in Rs and x not in Ps and b != 0:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "model": self.model.to_json(),
            "window": {"points": [list(p) for p in self.domain.points]},
            "P": [list(p) for p in self.P],
            "R": [list(r) for r in self.R],
        }


@dataclass
class AddressabilityCertificate:
    kind: str  # "addressable" | "strict" | "failure"
    p: Point | None
    refs: tuple[Point, ...]
    counterexample: tuple | None = None
    reason: str = ""
    condition5: bool | None = None
    condition5_witness: tuple | None = None
    checked_candidates: int = 0
    window_size: int = 0
    strict: bool = False

    @property
    def ok(self) -> bool:
        return self.kind != "failure"

    def to_json(self) -> dict:
        def enc(x):
            if x is None:
                return None
            if isinstance(x, tuple) and x and isinstance(x[0], tuple):
                return [list(y) for y in x]
            return list(x)

        return {
            "kind": self.kind,
            "p": enc(self.p),
            "refs": [list(r) for r in self.refs],
            "counterexample": enc(self.counterexample),
            "reason": self.reason,
            "condition5": self.condition5,
            "condition5_witness": enc(self.condition5_witness),
            "checked_candidates": self.checked_candidates,
            "window_size": self.window_size,
            "strict": self.strict,
        }


def _partners(model: GroupModel, key, x: Point, support: Sequence[Point], support_set: set) -> list[Point]:
    if isinstance(model, TranslationLattice):
        out = {model.add(x, model.neg(key)), model.add(x, key)}
        return sorted(y for y in out if y in support_set and y != x)
    return [y for y in support if y != x and model.key(x, y) == key]


def is_addressable(scheme: Scheme, p, refs: Sequence, strict: bool = False) -> AddressabilityCertificate:
    """Exhaustively decide whether ``p`` is addressable by ``refs``.

    With ``strict=True`` the conclusion is strengthened to ``r_i' = r_i``.
    Failures carry the first counterexample ``(p', r_1', ..., r_k')`` in
    canonical order.
    """
    p = as_point(p)
    refs = tuple(as_point(r) for r in refs)
    if p not in scheme.P:
        raise SchemeError(f"{p} is not a workspace point")
    Rset = set(scheme.R)
    for r in refs:
        if r not in Rset:
            raise SchemeError(f"{r} is not a base point")
    model = scheme.model
    keys = [class_of(model, p, r) for r in refs]
    support = scheme.support
    support_set = set(support)
    checked = 0
    for q in scheme.domain.points:
        sets = []
        for key in keys:
            s = _partners(model, key, q, support, support_set)
            if not s:
                break
            sets.append(s)
        else:
            checked += 1
            if q != p:
                cx = (q,) + tuple(s[0] for s in sets)
                return AddressabilityCertificate(
                    "failure", p, refs, cx, reason="another point matches every class", strict=strict,
                    checked_candidates=checked, window_size=scheme.domain.n)
            for i, s in enumerate(sets):
                bad = [y for y in s if (y != refs[i] if strict else y not in Rset)]
                if bad:
                    cx = [s[0] for s in sets]
                    cx[i] = bad[0]
                    why = f"reference {i + 1} is not pinned" if strict else f"reference {i + 1} may leave the base"
                    return AddressabilityCertificate(
                        "failure", p, refs, (q,) + tuple(cx), reason=why, strict=strict,
                        checked_candidates=checked, window_size=scheme.domain.n)
    return AddressabilityCertificate(
        "strict" if strict else "addressable", p, refs,
        checked_candidates=checked, window_size=scheme.domain.n, strict=strict)


def naive_addressable(scheme: Scheme, p, refs: Sequence, strict: bool = False) -> tuple | None:
    """Brute-force tuple enumeration; returns the first violating tuple or None."""
    p = as_point(p)
    refs = tuple(as_point(r) for r in refs)
    model = scheme.model
    keys = [class_of(model, p, r) for r in refs]
    support = scheme.support
    Rset = set(scheme.R)
    for q in scheme.domain.points:
        for tup in itertools.product(support, repeat=len(refs)):
            if any(y == q for y in tup):
                continue
            if all(model.key(q, y) == key or model.key(y, q) == key for y, key in zip(tup, keys)):
                if q != p:
                    return (q,) + tup
                if strict and tup != refs:
                    return (q,) + tup
                if not strict and not all(y in Rset for y in tup):
                    return (q,) + tup
    return None


def replay(scheme: Scheme, cert: AddressabilityCertificate) -> bool:
    """Re-check a certificate from scratch with the naive enumerator."""
    strict = cert.kind == "strict"
    if cert.kind == "failure":
        q, *tup = cert.counterexample
        keys = [class_of(scheme.model, cert.p, r) for r in cert.refs]
        support = set(scheme.support)
        m = scheme.model
        matches = all(y in support and (m.key(q, y) == key or m.key(y, q) == key)
                      for y, key in zip(tup, keys))
        if cert.strict:
            violates = q != cert.p or tuple(tup) != cert.refs
        else:
            violates = q != cert.p or any(y not in scheme.R for y in tup)
        return matches and violates and q in scheme.domain
    if cert.p is None:
        return all(naive_addressable(scheme, p, scheme.R, strict=True) is None for p in scheme.P)
    return naive_addressable(scheme, cert.p, cert.refs, strict=strict) is None


def check_condition5(scheme: Scheme) -> tuple[bool, tuple | None]:
    """Classes of workspace pairs never coincide with workspace-base classes.

    Returns ``(holds, witness)`` where the witness is ``(p, q, p', r)``.
    """
    m = scheme.model
    pr = {}
    for p in scheme.P:
        for r in scheme.R:
            pr.setdefault(m.key(p, r), (p, r))
    for p in scheme.P:
        for q in scheme.P:
            if p == q:
                continue
            for key in (m.key(p, q), m.key(q, p)):
                if key in pr:
                    return False, (p, q) + pr[key]
    return True, None


def is_strictly_addressable(scheme: Scheme) -> AddressabilityCertificate:
    """Certify strict addressability of every workspace point by the full base."""
    if scheme.k < 1:
        raise SchemeError("strict addressability needs a non-empty base")
    total = 0
    for p in scheme.P:
        cert = is_addressable(scheme, p, scheme.R, strict=True)
        total += cert.checked_candidates
        if not cert.ok:
            return cert
    holds, witness = check_condition5(scheme)
    return AddressabilityCertificate(
        "strict", None, scheme.R, condition5=holds, condition5_witness=witness,
        checked_candidates=total, window_size=scheme.domain.n, strict=True)


def strict_failures(scheme: Scheme) -> list[Point]:
    return [p for p in scheme.P if not is_addressable(scheme, p, scheme.R, strict=True).ok]


def prune_to_strict(scheme: Scheme) -> Scheme:
    """Drop failing workspace points until the scheme certifies.

    Removing workspace points only shrinks the candidate sets, so points that
    pass keep passing; the loop terminates with a certified scheme.
    """
    while True:
        bad = set(strict_failures(scheme))
        if not bad:
            return scheme
        scheme = Scheme(scheme.model, scheme.domain, tuple(p for p in scheme.P if p not in bad), scheme.R)


# --- homomorphisms onto factor groups ---------------------------------------


@dataclass(frozen=True)
class Homomorphism:
    """Integer-linear map ``x -> (M x) mod moduli`` between lattices."""

    matrix: tuple[tuple[int, ...], ...]
    moduli: tuple[int | None, ...]

    @property
    def target(self) -> TranslationLattice:
        return TranslationLattice(len(self.moduli), tuple(self.moduli))

    def __call__(self, x) -> Point:
        x = as_point(x)
        out = [sum(a * b for a, b in zip(row, x)) for row in self.matrix]
        return self.target.reduce(out)

    @classmethod
    def mod(cls, m: int, dim: int = 1, axis: int = 0) -> "Homomorphism":
        """Projection onto one axis followed by reduction mod ``m``."""
        row = tuple(1 if i == axis else 0 for i in range(dim))
        return cls((row,), (m,))

    @classmethod
    def project(cls, dim: int, axis: int = 0) -> "Homomorphism":
        row = tuple(1 if i == axis else 0 for i in range(dim))
        return cls((row,), (None,))

    def to_json(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix], "moduli": list(self.moduli)}


def lift_scheme(phi: Homomorphism, base: Scheme, preimages: Sequence, model: TranslationLattice,
                window: Domain) -> tuple[Scheme, AddressabilityCertificate]:
    """Pull a strictly addressable scheme back along a surjection ``phi``."""
    base_cert = is_strictly_addressable(base)
    if not base_cert.ok:
        raise LiftRefused("base scheme is not strictly addressable on its window")
    R = tuple(as_point(r) for r in preimages)
    if len(R) != base.k:
        raise LiftRefused("need one preimage per base point")
    for r, s in zip(R, base.R):
        if phi(r) != s:
            raise LiftRefused(f"{r} does not map to {s}")
    doubled = {model.scale(2, r) for r in R}
    if len(doubled) < 2:
        raise LiftRefused("2 r_i coincide for all i, j")
    Q = set(base.P)
    P = tuple(x for x in window.points if phi(x) in Q)
    lifted = Scheme(model, window, P, R)
    return lifted, is_strictly_addressable(lifted)


def build_z4_scheme(model: TranslationLattice, window: Domain, phi: Homomorphism,
                    refs: Sequence) -> Scheme:
    """Three-point base scheme over a group with an epimorphism onto Z_4."""
    R = tuple(as_point(r) for r in refs)
    if len(R) != 3:
        raise PreconditionError("exactly three base points are required", ["three-points"])
    violated = []
    if {phi(r) for r in R} != {(1,), (3,)}:
        violated.append("phi(R) = {1, 3}")
    diffs = [model.sub(R[i], R[j]) for i in range(3) for j in range(3) if i != j]
    if len(set(diffs)) != len(diffs):
        violated.append("distinct differences r_i - r_j")
    if violated:
        raise PreconditionError("; ".join(violated) + " violated", violated)
    sums = {model.add(R[i], R[j]) for i in range(3) for j in range(3)}
    P = tuple(x for x in window.points
              if phi(x) == (0,) and model.scale(2, x) not in sums and x not in R)
    return Scheme(model, window, P, R)


@dataclass
class FourPointReport:
    ok: bool
    violated: list[str] = field(default_factory=list)
    distances: tuple[list[int], list[int]] | None = None

    def __bool__(self):
        return self.ok


def check_four_point(model: TranslationLattice, refs: Sequence, extra, phi: Homomorphism) -> FourPointReport:
    """Hypotheses under which ``extra`` is strictly addressable by ``refs``.

    Raises :class:`PreconditionError` when the points do not sit in the
    odd residue classes the statement requires.
    """
    R = [as_point(r) for r in refs]
    r4 = as_point(extra)
    pts = R + [r4]
    if any(phi(x) not in {(1,), (3,)} for x in pts):
        raise PreconditionError("all four points must map to {1, 3}", ["phi(r) in {1, 3}"])
    if {phi(r) for r in R} != {(1,), (3,)}:
        raise PreconditionError("phi({r1, r2, r3}) must equal {1, 3}", ["phi(R) = {1, 3}"])
    violated = []
    if model.scale(3, r4) == model.add(model.add(R[0], R[1]), R[2]):
        violated.append("3 r4 != r1 + r2 + r3")
    diffs = [model.sub(a, b) for a in pts for b in pts if a != b]
    if len(set(diffs)) != len(diffs):
        violated.append("distinct differences r_i - r_j")
    dist = None
    if model.dim == 1 and model.moduli == (None,):
        inner = sorted(abs(a[0] - b[0]) for a, b in itertools.combinations(R, 2))
        outer = [abs(r4[0] - r[0]) for r in R]
        dist = (inner, outer)
    return FourPointReport(not violated, violated, dist)


def four_point_exhaustive(model: TranslationLattice, window: Domain, refs: Sequence, extra,
                          phi: Homomorphism) -> AddressabilityCertificate:
    """Window check of the four-point statement with workspace ``phi^-1(0) u {r4}``."""
    R = tuple(as_point(r) for r in refs)
    r4 = as_point(extra)
    P = tuple(x for x in window.points if phi(x) == (0,)) + (r4,)
    scheme = Scheme(model, window, P, R)
    return is_addressable(scheme, r4, R, strict=True)


# --- Euclidean lattice search ------------------------------------------------


def _residue(p: Point, mod: int) -> Point:
    return tuple(c % mod for c in p)


def euclid_scaffold_ok(R: Sequence[Point]) -> bool:
    """The mod-8 / mod-4 congruences that separate base from workspace distances."""
    if len(R) < 2:
        return False
    s = len(R[0])
    e = lambda a: tuple([a] + [0] * (s - 1))  # noqa: E731
    if _residue(R[0], 8) != e(1) or _residue(R[1], 8) != e(5):
        return False
    return all(_residue(r, 4) == e(1) for r in R)


@dataclass
class SearchResult:
    scheme: Scheme | None
    certificate: AddressabilityCertificate | None
    trials: int
    candidates_rejected: int
    candidates_certified: int

    @property
    def found(self) -> bool:
        return self.scheme is not None


def search_euclidean_scheme(s: int, window: Domain, k: int = 3, trials: int = 200,
                            seed: int = 0) -> SearchResult:
    """Random search for a strictly addressable Euclidean scheme on ``window``.

    Candidate bases follow the congruence scaffolding; for each the workspace
    starts as ``8Z^s`` on the window and is pruned to a certified set.  The
    best candidate (largest workspace, then lexicographically smallest base)
    is returned.
    """
    if s < 2:
        raise SchemeError("use build_z4_scheme for s = 1")
    model = EuclideanIsometry(s)
    rng = random.Random(seed)
    pts = window.points
    by_class = {
        8: [p for p in pts if _residue(p, 8) == tuple([1] + [0] * (s - 1))],
        5: [p for p in pts if _residue(p, 8) == tuple([5] + [0] * (s - 1))],
        4: [p for p in pts if _residue(p, 4) == tuple([1] + [0] * (s - 1))],
    }
    workspace = [p for p in pts if all(c % 8 == 0 for c in p)]
    best = None
    rejected = certified = 0
    if not by_class[8] or not by_class[5]:
        return SearchResult(None, None, trials, 0, 0)
    for _ in range(trials):
        R = [rng.choice(by_class[8]), rng.choice(by_class[5])]
        R += [rng.choice(by_class[4]) for _ in range(k - 2)]
        if len(set(R)) != len(R) or not euclid_scaffold_ok(R):
            rejected += 1
            continue
        scheme = prune_to_strict(Scheme(model, window, tuple(workspace), tuple(R)))
        if not scheme.P:
            continue
        certified += 1
        score = (-len(scheme.P), scheme.R)
        if best is None or score < best[0]:
            best = (score, scheme)
    if best is None:
        return SearchResult(None, None, trials, rejected, certified)
    scheme = best[1]
    return SearchResult(scheme, is_strictly_addressable(scheme), trials, rejected, certified)


# --- named constructions ------------------------------------------------------


def z14_scheme() -> Scheme:
    model = TranslationLattice(1, (14,))
    return Scheme(model, Domain.interval(0, 13), ((0,),), ((1,), (3,), (7,)))


def z139_scheme(m: int, refs=(1, 3, 9)) -> Scheme:
    """``(4Z, refs)`` restricted to the window ``[-4m, 4m]``."""
    model = TranslationLattice(1)
    window = Domain.interval(-4 * m, 4 * m)
    P = tuple(x for x in window.points if x[0] % 4 == 0)
    return Scheme(model, window, P, tuple((r,) for r in refs))


def residue_points(window: Domain, modulus: Sequence[int], offset: Sequence[int]) -> tuple[Point, ...]:
    return tuple(x for x in window.points
                 if all((c - o) % m == 0 for c, m, o in zip(x, modulus, offset)))


def scheme_from_json(d: dict) -> Scheme:
    """Load a scheme description; see README for the schema."""
    model = model_from_json(d["model"])
    w = d["window"]
    if "points" in w:
        window = Domain.from_points(w["points"])
    else:
        window = Domain.box(w["lo"], w["hi"])
    P = d["P"]
    if isinstance(P, dict):
        pts = residue_points(window, P["modulus"], P.get("offset", [0] * window.dim))
        exclude = {as_point(x) for x in P.get("exclude", [])}
        R = {as_point(r) for r in d["R"]}
        P = [x for x in pts if x not in exclude and x not in R]
    return Scheme(model, window, tuple(as_point(x) for x in P), tuple(as_point(r) for r in d["R"]))


def densities(scheme: Scheme) -> dict:
    return {"workspace": len(scheme.P), "window": scheme.domain.n, "density": scheme.density()}


def iter_points(pts: Iterable) -> list[Point]:
    return [as_point(p) for p in pts]
