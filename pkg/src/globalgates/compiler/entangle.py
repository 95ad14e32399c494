"""Entangling pulses and selective refocusing of simultaneous couplings.

On admissible states ``A^C`` reduces to ``sum W(x, y) n_x n_y`` over
workspace pairs in ``C`` (plus a constant) when workspace-base classes are
disjoint from workspace-workspace classes.  Refocusing splits the pulse into
``m`` equal segments and conjugates some sites by a bit flip in some
segments, following columns of a Sylvester-Hadamard matrix, so that only
the target coupling survives.  All bookkeeping is in exact fractions of the
pulse time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..geometry import as_point, class_of, normalize_key
from ..quantum import BalanceFunction, xy_rotation
from ..schemes import Scheme, check_condition5
from .local import rz
from .pulses import LocalSlot, PulseSequence, TwoQubitPhase, concat, Block


class ConditionError(ValueError):
    """Workspace-workspace and workspace-base classes overlap."""


class RefocusError(ValueError):
    pass


FLIP = xy_rotation(math.pi / 2)  # i sigma_y: |0> -> -|1>, |1> -> |0>


def workspace_pairs(scheme: Scheme, key) -> list[tuple]:
    """Unordered workspace pairs ``{x, y}`` with ``(x, y)`` or ``(y, x)`` in the class."""
    key = normalize_key(scheme.model, key)
    out = set()
    for x in scheme.P:
        for y in scheme.P:
            if x < y and (scheme.model.key(x, y) == key or scheme.model.key(y, x) == key):
                out.add((x, y))
    return sorted(out)


@dataclass
class EntanglingAction:
    key: object
    T: float
    pairs: list  # (x, y, phase) with exp(-i phase n_x n_y)
    identity: bool

    def to_json(self) -> dict:
        return {"key": list(self.key) if isinstance(self.key, tuple) else self.key, "T": self.T,
                "pairs": [[list(x), list(y), ph] for x, y, ph in self.pairs], "identity": self.identity}


def _pair_weight(scheme: Scheme, key, W: BalanceFunction, x, y) -> float:
    D, m = scheme.domain, scheme.model
    w = 0.0
    if m.key(x, y) == key:
        w += W.pair(D.index(x), D.index(y))
    if m.key(y, x) == key:
        w += W.pair(D.index(y), D.index(x))
    return w


def entangling_pulse(scheme: Scheme, p, q, T: float, W: BalanceFunction | None = None):
    """The pulse ``exp(-i T A^{C(p,q)})`` and its action on admissible states."""
    holds, witness = check_condition5(scheme)
    if not holds:
        raise ConditionError(f"workspace and base classes overlap: {witness}")
    p, q = as_point(p), as_point(q)
    W = W or BalanceFunction.constant(scheme.domain.n)
    key = class_of(scheme.model, p, q)
    pairs = [(x, y, T * _pair_weight(scheme, key, W, x, y)) for x, y in workspace_pairs(scheme, key)]
    identity = T == 0 or not pairs
    return TwoQubitPhase(key, T), EntanglingAction(key, T, pairs, identity)


def sylvester(m: int) -> np.ndarray:
    H = np.ones((1, 1), dtype=int)
    while H.shape[0] < m:
        H = np.block([[H, H], [H, -H]])
    return H


@dataclass
class PhaseLedger:
    """Exact coefficients, in units of ``T W(x, y)``, of the accumulated phase."""

    quadratic: dict = field(default_factory=dict)  # (x, y) -> Fraction for n_x n_y
    linear: dict = field(default_factory=dict)  # ((x, y), site) -> Fraction for n_site

    def add_segment(self, pairs, flipped: set, frac: Fraction):
        for x, y in pairs:
            fx, fy = x in flipped, y in flipped
            # n -> 1 - n on flipped sites
            sx, sy = (-1 if fx else 1), (-1 if fy else 1)
            self.quadratic[(x, y)] = self.quadratic.get((x, y), Fraction(0)) + frac * sx * sy
            if fx:
                self.linear[((x, y), y)] = self.linear.get(((x, y), y), Fraction(0)) + frac * sy
            if fy:
                self.linear[((x, y), x)] = self.linear.get(((x, y), x), Fraction(0)) + frac * sx

    def residual_pairs(self, target) -> dict:
        return {k: v for k, v in self.quadratic.items() if k != target and v != 0}


@dataclass
class RefocusPlan:
    target: tuple
    key: object
    size: int
    columns: dict  # site -> column index of the design
    ledger: PhaseLedger
    corrections: dict  # site -> phase on n_site to undo (radians)

    def to_json(self) -> dict:
        return {
            "target": [list(x) for x in self.target],
            "design_size": self.size,
            "columns": {str(list(k)): v for k, v in self.columns.items()},
            "quadratic": {f"{list(a)}-{list(b)}": str(v) for (a, b), v in self.ledger.quadratic.items()},
            "residual_pairs": len(self.ledger.residual_pairs(self.target)),
            "corrections": {str(list(k)): v for k, v in self.corrections.items()},
        }


def _colour(sites, pairs, target):
    """Greedy colouring: coupled non-target sites get distinct non-zero columns."""
    adj = {s: set() for s in sites}
    for x, y in pairs:
        adj[x].add(y)
        adj[y].add(x)
    fixed = set(target)
    cols = {s: 0 for s in fixed}
    for s in sites:
        if s in fixed:
            continue
        if not adj[s]:
            cols[s] = 0
            continue
        used = {cols[t] for t in adj[s] if t in cols}
        c = 1
        while c in used:
            c += 1
        cols[s] = c
    return cols


def plan_refocus(scheme: Scheme, p, q, key=None, T: float = math.pi, W: BalanceFunction | None = None,
                 max_size: int = 64) -> RefocusPlan:
    p, q = as_point(p), as_point(q)
    target = tuple(sorted((p, q)))
    key = class_of(scheme.model, p, q) if key is None else normalize_key(scheme.model, key)
    pairs = workspace_pairs(scheme, key)
    if target not in pairs:
        raise RefocusError(f"{target} is not a coupled pair of class {key}")
    W = W or BalanceFunction.constant(scheme.domain.n)
    sites = sorted({s for pr in pairs for s in pr})
    cols = _colour(sites, pairs, target)
    need = max(cols.values()) + 1
    size = 1 << (need - 1).bit_length()
    if size > max_size:
        raise RefocusError(f"design of size {size} exceeds the window budget {max_size}")
    H = sylvester(size)
    ledger = PhaseLedger()
    frac = Fraction(1, size)
    for seg in range(size):
        flipped = {s for s, c in cols.items() if H[seg, c] < 0}
        ledger.add_segment(pairs, flipped, frac)
    corrections: dict = {}
    for ((x, y), site), coeff in ledger.linear.items():
        if coeff:
            corrections[site] = corrections.get(site, 0.0) + float(coeff) * T * _pair_weight(scheme, key, W, x, y)
    return RefocusPlan(target, key, size, cols, ledger, corrections)


def refocus_pair(scheme: Scheme, p, q, key=None, T: float = math.pi, W: BalanceFunction | None = None,
                 flip_budget: float = 0.0, refs: dict | None = None) -> tuple[PulseSequence, RefocusPlan]:
    """Controlled phase ``exp(-i T W(p,q) n_p n_q)`` on the pair alone.

    Flips and the final linear corrections are emitted as local slots, each
    carrying ``flip_budget`` as its allotted compilation error.
    """
    holds, witness = check_condition5(scheme)
    if not holds:
        raise ConditionError(f"workspace and base classes overlap: {witness}")
    W = W or BalanceFunction.constant(scheme.domain.n)
    plan = plan_refocus(scheme, p, q, key, T, W)
    H = sylvester(plan.size)
    refs = refs or {}

    def slot(site, U, label):
        return LocalSlot.make(site, U, budget=flip_budget, refs=tuple(refs.get(site, ())), label=label)

    parts = []
    state = {s: False for s in plan.columns}
    for seg in range(plan.size):
        want = {s: H[seg, c] < 0 for s, c in plan.columns.items()}
        parts += [slot(s, FLIP, "flip") for s in sorted(state) if state[s] != want[s]]
        state = want
        parts.append(TwoQubitPhase(plan.key, T / plan.size))
    parts += [slot(s, FLIP.conj().T, "flip") for s in sorted(state) if state[s]]
    for site, phase in sorted(plan.corrections.items()):
        # undo exp(-i phase n_site); rz(phase) equals the inverse up to a global phase
        parts.append(slot(site, rz(phase), "z-correction"))
    w_pq = _pair_weight(scheme, plan.key, W, *plan.target)
    target = [{"op": "pair_phase", "p": list(plan.target[0]), "q": list(plan.target[1]), "phi": T * w_pq}]
    n_slots = sum(isinstance(x, LocalSlot) for x in parts)
    seq = PulseSequence(concat(Block(tuple(parts))), target, n_slots * flip_budget,
                        [{"gate": "slot", "epsilon": flip_budget} for _ in range(n_slots)],
                        len(parts), len(parts))
    return seq, plan
