"""Whole circuits: per-gate budgets, base shifts and refocused two-qubit phases.

Two targets are supported.  A fixed scheme maps logical qubit ``j`` to the
``j``-th workspace point and addresses every gate with the whole base.  A
shiftable chain places logical qubit ``j`` at ``stride * j`` and moves the
base ``{4l+1, 4l+3, 4l+9}`` next to each site before touching it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..geometry import Domain, TranslationLattice, as_point
from ..quantum import BalanceFunction
from ..extraction import AddressError
from ..schemes import Scheme, is_addressable
from .entangle import entangling_pulse, refocus_pair, workspace_pairs
from .local import Budget, compile_local_unitary, local_target, rx, ry, rz
from .pulses import LocalSlot, PulseSequence, concat
from .shift import MAX_DISTANCE, ShiftState, base_positions, shift_base, span

_S = np.diag([1, 1j])
_T = np.diag([1, np.exp(1j * math.pi / 4)])
_H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
ONE_QUBIT = {
    "x": lambda: np.array([[0, 1], [1, 0]], dtype=complex),
    "y": lambda: np.array([[0, -1j], [1j, 0]]),
    "z": lambda: np.diag([1.0 + 0j, -1.0]),
    "h": lambda: _H.astype(complex),
    "s": lambda: _S,
    "t": lambda: _T,
    "rx": rx,
    "ry": ry,
    "rz": rz,
}
TWO_QUBIT = ("cz", "cphase")


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple
    params: tuple = ()

    @classmethod
    def parse(cls, g) -> "Gate":
        if isinstance(g, Gate):
            return g
        if isinstance(g, dict):
            return cls(g["name"].lower(), tuple(g["qubits"]), tuple(g.get("params", ())))
        name, qubits, *rest = g
        qubits = (qubits,) if isinstance(qubits, int) else tuple(qubits)
        return cls(name.lower(), qubits, tuple(rest[0]) if rest and isinstance(rest[0], (list, tuple)) else tuple(rest))

    def matrix(self) -> np.ndarray:
        if self.name == "u":
            return np.array(self.params[0], dtype=complex)
        if self.name not in ONE_QUBIT:
            raise CircuitError(f"unknown one-qubit gate {self.name!r}")
        return np.asarray(ONE_QUBIT[self.name](*self.params), dtype=complex)

    def phase(self) -> float:
        return math.pi if self.name == "cz" else float(self.params[0])


@dataclass
class ShiftableChain:
    """Logical qubits at ``stride * j`` with a movable three-point base."""

    n_logical: int
    stride: int = 8
    ell: int = 0
    margin: int = 4

    def __post_init__(self):
        if self.stride % 4 or self.stride <= 0:
            raise CircuitError("stride must be a positive multiple of 4")

    def site(self, j: int) -> tuple:
        if not 0 <= j < self.n_logical:
            raise CircuitError(f"logical qubit {j} outside the workspace")
        return (self.stride * j,)

    def workspace(self) -> tuple:
        return tuple((self.stride * j,) for j in range(self.n_logical))

    def ell_for(self, j: int) -> int:
        return self.stride * j // 4

    def window(self) -> tuple[int, int]:
        ells = [self.ell] + [self.ell_for(j) for j in range(self.n_logical)]
        lo = min(min(span(e)[0] for e in ells), 0) - self.margin
        hi = max(max(span(e)[1] for e in ells), self.stride * (self.n_logical - 1)) + self.margin
        return lo, hi

    def scheme(self, ell: int, extra=()) -> Scheme:
        lo, hi = self.window()
        D = Domain.interval(lo, hi)
        P = self.workspace() + tuple(as_point(e) for e in extra)
        return Scheme(TranslationLattice(1), D, P, tuple((r,) for r in base_positions(ell)))


def _compile_unit(unit, share, expand, W, budget):
    """A compiled one-qubit gate, or a slot standing in for it."""
    scheme, site, refs, U, label = unit
    cert = is_addressable(scheme, site, refs)
    if not cert.ok:
        raise AddressError(f"{label} at {site}: not addressable by {refs}, counterexample {cert.counterexample}")
    if expand:
        seq = compile_local_unitary(scheme, site, refs, U, share, W=W, budget=budget)
        return seq.root, seq.budget_trace, seq.certified
    keys = tuple(tuple(a - b for a, b in zip(as_point(site), as_point(r))) for r in refs)
    slot = LocalSlot.make(site, U, budget=share, refs=tuple(as_point(r) for r in refs), keys=keys, label=label)
    return slot, [{"gate": label, "epsilon": share}], False


def _flip_scheme(chain: ShiftableChain, slot: LocalSlot) -> Scheme:
    """Scheme in force during one shift flip: workspace plus the flipped point."""
    lo, hi = chain.window()
    refs = tuple(slot.refs)
    P = tuple(x for x in chain.workspace() if x not in refs) + (slot.site,)
    return Scheme(TranslationLattice(1), Domain.interval(lo, hi), P, refs)


def _validate(gates, n_log):
    for g in gates:
        for q in g.qubits:
            if not 0 <= q < n_log:
                raise CircuitError(f"logical qubit {q} outside the workspace")
        if g.name in TWO_QUBIT:
            if len(g.qubits) != 2 or g.qubits[0] == g.qubits[1]:
                raise CircuitError(f"{g.name} needs two distinct qubits")
        elif len(g.qubits) != 1:
            raise CircuitError(f"{g.name} acts on one qubit")
        else:
            g.matrix()


def _lower(gates, chain, scheme, W):
    """Rewrite the circuit as pulses, one-qubit units and ideal target ops."""
    ops, target = [], []
    state = ShiftState(chain.ell, *chain.window()) if chain else None

    def move_to(ell):
        nonlocal state
        while state.ell != ell:
            state, seq = shift_base(state, 1 if ell > state.ell else -1)
            for slot in seq.root.children:
                ops.append(("unit", (_flip_scheme(chain, slot), slot.site, slot.refs, slot.matrix, slot.label)))
            target.extend(seq.target)

    def unit(site, U, label):
        if chain:
            move_to(site[0] // 4)
            ops.append(("unit", (chain.scheme(state.ell), site, tuple((r,) for r in state.base), U, label)))
        else:
            ops.append(("unit", (scheme, site, scheme.R, U, label)))

    for g in gates:
        if g.name in TWO_QUBIT:
            p, q = (chain.site(x) if chain else scheme.P[x] for x in g.qubits)
            sch = chain.scheme(state.ell) if chain else scheme
            key = tuple(a - b for a, b in zip(p, q))
            T = g.phase() / W.pair(sch.domain.index(p), sch.domain.index(q))
            if len(workspace_pairs(sch, key)) == 1:
                ops.append(("pulse", entangling_pulse(sch, p, q, T, W)[0]))
            else:
                seq, _ = refocus_pair(sch, p, q, T=T, W=W)
                for node in seq.root.children:
                    if isinstance(node, LocalSlot):
                        unit(node.site, node.matrix, node.label)
                    else:
                        ops.append(("pulse", node))
            target.append({"op": "pair_phase", "p": list(p), "q": list(q), "phi": g.phase()})
        else:
            site = chain.site(g.qubits[0]) if chain else scheme.P[g.qubits[0]]
            unit(site, g.matrix(), g.name)
            target.append(local_target(site, g.matrix()))
    return ops, target, state


def compile_circuit(target, circuit, epsilon: float, W: BalanceFunction | None = None,
                    budget: Budget | None = None, expand: bool = True) -> tuple[PulseSequence, dict]:
    """Compile ``circuit`` (gates on logical qubits) for a scheme or a shiftable chain.

    Every compiled one-qubit unit, base-shift flips and refocusing flips
    included, gets ``epsilon`` divided by the number of units.  With
    ``expand=False`` units are emitted as slots recording their budget and
    the classes they would pulse.
    """
    if not (0 < epsilon < 1):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    gates = [Gate.parse(g) for g in circuit]
    chain = target if isinstance(target, ShiftableChain) else None
    scheme = None if chain else target
    _validate(gates, chain.n_logical if chain else len(scheme.P))
    if not gates:
        return PulseSequence.empty([], epsilon), {"units": 0, "max_offset": 0, "length": 0}
    n = (chain.scheme(chain.ell) if chain else scheme).domain.n
    W = W or BalanceFunction.constant(n)
    budget = budget or Budget()
    ops, ideal, state = _lower(gates, chain, scheme, W)
    units = sum(1 for kind, _ in ops if kind == "unit")
    share = epsilon / max(units, 1)
    parts, trace, certified = [], [], True
    for kind, item in ops:
        if kind == "pulse":
            parts.append(item)
            continue
        node, tr, cert = _compile_unit(item, share, expand, W, budget)
        parts.append(node)
        trace += tr
        certified &= cert
    root = concat(*parts)
    seq = PulseSequence(root, ideal, epsilon, trace, len(root), None, budget.c, certified)
    report = {"units": units, "per_unit_epsilon": share, "allotted_error": seq.allotted_error(),
              "max_offset": seq.max_offset(), "length": len(root), "certified": certified}
    if chain:
        report.update(distance_bound=MAX_DISTANCE, within_distance_bound=report["max_offset"] <= MAX_DISTANCE,
                      final_ell=state.ell, window=list(chain.window()), stride=chain.stride)
    return seq, report
