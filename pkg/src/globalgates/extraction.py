"""Nested commutators of controlled-phase generators with global rotations.

Commuting ``A^C`` (diagonal) with an elementary matrix ``E_{a,b}`` multiplies
it by ``A^C_{aa} - A^C_{bb}``, so a nested commutator of diagonals with
``E_{a, del_q a}`` is a scalar multiple of it.  ``nested_scalar`` evaluates
that scalar by iterating the one-step formula; the verifiers compare it, and
the full proposition, against matrices built from the entrywise definitions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .geometry import Domain, GroupModel, as_point, class_of
from .quantum import (
    CPHASE,
    BalanceFunction,
    commutator,
    embed_one,
    global_one_qubit,
    global_two_qubit,
    xy_generator,
)
from .schemes import Scheme, is_addressable


class AddressError(ValueError):
    """The references given do not address the target point."""


def modified_balance(model: GroupModel, domain: Domain, key, W: BalanceFunction, p, q) -> float:
    """Symmetrised pair weight of ``(p, q)`` relative to the class ``key``."""
    p, q = as_point(p), as_point(q)
    if p == q:
        raise ValueError("modified balance is undefined on the diagonal")
    i, j = domain.index(p), domain.index(q)
    fwd = model.key(p, q) == key
    bwd = model.key(q, p) == key
    return (W.pair(i, j) if fwd else 0.0) + (W.pair(j, i) if bwd else 0.0)


@dataclass
class ExtractionPlan:
    p: tuple
    refs: tuple
    keys: list
    weights: list[float]  # W_i = sum_{r in R} W_{C_i}(p, r)
    site_weight: float

    @property
    def k(self) -> int:
        return len(self.refs)

    @property
    def product(self) -> float:
        return float(np.prod(self.weights)) if self.weights else 1.0


def extraction_plan(scheme: Scheme, p, refs, W: BalanceFunction) -> ExtractionPlan:
    p = as_point(p)
    refs = tuple(as_point(r) for r in refs)
    D = scheme.domain
    keys = [class_of(scheme.model, p, r) for r in refs]
    weights = [sum(modified_balance(scheme.model, D, key, W, p, r) for r in scheme.R) for key in keys]
    return ExtractionPlan(p, refs, keys, weights, W.site(D.index(p)))


def nested_scalar(model: GroupModel, domain: Domain, keys, a: int, q, W: BalanceFunction) -> float:
    """Scalar ``c`` with ``[A^C1, [..., [A^Ck, E_{a, del_q a}]]] = c E_{a, del_q a}``."""
    q = as_point(q)
    iq = domain.index(q)
    if not (a >> iq) & 1:
        return 0.0
    out = 1.0
    for key in keys:
        c = 0.0
        for x in domain.points:
            if x == q:
                continue
            ix = domain.index(x)
            if (a >> ix) & 1:
                c += modified_balance(model, domain, key, W, q, x)
        out *= c
        if out == 0.0:
            break
    return out


def admissible_indices(scheme: Scheme) -> np.ndarray:
    """Basis indices of admissible configurations, ordered by workspace bits."""
    D = scheme.domain
    base = sum(1 << D.index(r) for r in scheme.R)
    pbits = [D.index(p) for p in scheme.P]
    out = []
    for bits in itertools.product((0, 1), repeat=len(pbits)):
        out.append(base | sum(b << i for b, i in zip(reversed(bits), pbits)))
    return np.array(sorted(out), dtype=np.int64)


def is_admissible_index(scheme: Scheme, a: int) -> bool:
    D = scheme.domain
    Rs = set(scheme.R)
    Ps = set(scheme.P)
    for x in D.points:
        b = (a >> D.index(x)) & 1
        if x in Rs and not b:
            return False
        if x not in Rs and x not in Ps and b:
            return False
    return True


@dataclass
class ExtractionReport:
    p: tuple
    refs: tuple
    cases: int = 0
    violations: list = field(default_factory=list)
    max_deviation: float = 0.0
    oracle_deviation: float = 0.0
    unconstrained_max: float = 0.0
    coefficient: float | None = None
    addressed: bool = True

    @property
    def ok(self) -> bool:
        return not self.violations and self.max_deviation < 1e-10 and self.oracle_deviation < 1e-10

    def to_json(self) -> dict:
        return {
            "p": list(self.p),
            "refs": [list(r) for r in self.refs],
            "addressed": self.addressed,
            "cases": self.cases,
            "violations": [dict(v) for v in self.violations[:50]],
            "violation_count": len(self.violations),
            "max_deviation": self.max_deviation,
            "oracle_deviation": self.oracle_deviation,
            "unconstrained_max": self.unconstrained_max,
            "coefficient": self.coefficient,
            "pass": self.ok,
        }


def _require_address(scheme: Scheme, p, refs, require: bool) -> bool:
    cert = is_addressable(scheme, p, refs)
    if not cert.ok and require:
        raise AddressError(f"{p} is not addressable by {refs}: counterexample {cert.counterexample}")
    return cert.ok


def _diagonals(scheme: Scheme, keys, W: BalanceFunction):
    """Diagonals of ``A^{C_i}`` extracted from the explicitly built operators."""
    return [global_two_qubit(CPHASE, scheme.model, scheme.domain, key, W).diagonal().real for key in keys]


def verify_extraction_lemma(scheme: Scheme, p, refs, W: BalanceFunction | None = None,
                            require_address: bool = True, oracle: bool = True) -> ExtractionReport:
    """Check the elementary-matrix statement for every admissible ``a`` and ``q``.

    Expected: the nested commutator with ``E_{a, del_q a}`` is
    ``W_1...W_k E`` when ``q = p`` and ``a_p = 1`` and vanishes otherwise; it
    also vanishes when ``a`` is inadmissible but ``del_q a`` is admissible.
    With ``oracle=True`` every scalar is recomputed from explicit matrices.
    """
    D = scheme.domain
    W = W or BalanceFunction.constant(D.n)
    p = as_point(p)
    addressed = _require_address(scheme, p, refs, require_address)
    plan = extraction_plan(scheme, p, refs, W)
    rep = ExtractionReport(p, plan.refs, coefficient=plan.product, addressed=addressed)
    diags = _diagonals(scheme, plan.keys, W) if oracle else None

    def oracle_scalar(a, b):
        # nested commutators of diagonals with E_ab, built as sparse matrices
        dim = 2**D.n
        E = sp.csr_matrix(([1.0 + 0j], ([a], [b])), shape=(dim, dim))
        for d in reversed(diags):
            A = sp.diags(d.astype(complex))
            E = A @ E - E @ A
        return complex(E[a, b])

    for a in admissible_indices(scheme):
        for q in D.points:
            iq = D.index(q)
            for a_, label in ((int(a), "admissible"), (int(a) | (1 << iq), "lifted")):
                b = a_ & ~(1 << iq)
                if label == "lifted":
                    # a inadmissible, del_q a admissible
                    if (int(a) >> iq) & 1 or is_admissible_index(scheme, a_):
                        continue
                    expected = 0.0
                else:
                    expected = plan.product if (q == p and (a_ >> iq) & 1) else 0.0
                got = nested_scalar(scheme.model, D, plan.keys, a_, q, W)
                rep.cases += 1
                dev = abs(got - expected)
                rep.max_deviation = max(rep.max_deviation, dev)
                if dev > 1e-10:
                    rep.violations.append({"a": a_, "q": list(q), "branch": label,
                                           "expected": expected, "actual": got})
                if oracle and (a_ >> iq) & 1:
                    rep.oracle_deviation = max(rep.oracle_deviation, abs(oracle_scalar(a_, b) - got))
    return rep


def tilde_generator(z: complex, k: int) -> np.ndarray:
    """Local generator left after ``k`` nested ``[-i A^C, .]`` applications.

    With ``z`` in the ``|0><1|`` entry each commutator multiplies that entry by
    ``+i W_i`` and the ``|1><0|`` entry by ``-i W_i``, giving
    ``[[0, i^k z], [-(-i)^k conj z, 0]]``.
    """
    return np.array([[0, (1j**k) * z], [-((-1j) ** k) * np.conj(z), 0]], dtype=complex)


def source_amplitude(z: complex, k: int) -> complex:
    """The ``z'`` whose extracted generator is ``[[0, z], [-conj z, 0]]``."""
    return (-1j) ** k * z


def nested_with_global_rotation(scheme: Scheme, keys, z: complex, W: BalanceFunction):
    """``[-i A^C1, [..., [-i A^Ck, X^diamond]]]`` as an explicit sparse matrix."""
    X = global_one_qubit(xy_generator(z), W)
    for key in reversed(keys):
        A = global_two_qubit(CPHASE, scheme.model, scheme.domain, key, W)
        X = commutator(-1j * A, X)
    return X


def verify_extraction_proposition(scheme: Scheme, p, refs, z: complex = 1.0,
                                  W: BalanceFunction | None = None,
                                  require_address: bool = True) -> ExtractionReport:
    """Entrywise check of the extracted local generator on admissible rows/columns."""
    D = scheme.domain
    W = W or BalanceFunction.constant(D.n)
    p = as_point(p)
    if z == 0:
        raise ValueError("z must be non-zero")
    addressed = _require_address(scheme, p, refs, require_address)
    plan = extraction_plan(scheme, p, refs, W)
    lhs = nested_with_global_rotation(scheme, plan.keys, z, W)
    coeff = plan.site_weight * plan.product
    rhs = coeff * embed_one(tilde_generator(z, plan.k), D.index(p), D.n)
    diff = (lhs - rhs).tocoo()
    adm = np.zeros(2**D.n, dtype=bool)
    adm[admissible_indices(scheme)] = True
    rep = ExtractionReport(p, plan.refs, coefficient=coeff, addressed=addressed)
    constrained = adm[diff.row] | adm[diff.col]
    mags = np.abs(diff.data)
    rep.cases = int(adm.sum()) * 2 ** D.n
    if constrained.any():
        rep.max_deviation = float(mags[constrained].max(initial=0.0))
    if (~constrained).any():
        rep.unconstrained_max = float(mags[~constrained].max(initial=0.0))
    bad = constrained & (mags > 1e-10)
    for r, c, v in list(zip(diff.row[bad], diff.col[bad], mags[bad]))[:50]:
        rep.violations.append({"row": int(r), "col": int(c), "deviation": float(v)})
    if bad.sum() > 50:
        rep.violations.extend({"truncated": True} for _ in range(int(bad.sum()) - 50))
    return rep
