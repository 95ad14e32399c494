"""Executable pulses and the repeated-block tree that holds them.

A compiled sequence is a tree: leaves are pulses, inner nodes are blocks
repeated ``N`` times.  Lengths are computed from the tree without
flattening, so sequences far too long to simulate can still be counted and
inspected.  Children run in time order (first child first).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from ..geometry import Domain, GroupModel, as_point, normalize_key
from ..quantum import BalanceFunction, apply_diagonal_phase, apply_local, apply_tensor_local, cphase_diagonal

DENSE_BLOCK_QUBITS = 9


class PulseContext:
    """Cached diagonals and site weights for one (model, domain, W)."""

    def __init__(self, model: GroupModel, domain: Domain, W: BalanceFunction):
        if W.n != domain.n:
            raise ValueError("balance function size does not match the domain")
        self.model = model
        self.domain = domain
        self.W = W
        self.site_weights = W.sites
        self._diag: dict = {}
        self._blocks: dict = {}
        # blocks are replaced by their dense unitary up to this many qubits
        self.dense_blocks = domain.n <= DENSE_BLOCK_QUBITS

    @property
    def n(self) -> int:
        return self.domain.n

    def block_unitary(self, block: "Block") -> np.ndarray:
        """Dense unitary of ``block`` (all repeats), memoised per block object."""
        hit = self._blocks.get(id(block))
        if hit is not None and hit[0] is block:
            return hit[1]
        dim = 2**self.n
        once = np.eye(dim, dtype=complex)
        for c in block.children:
            once = c.apply(once, self)
        U = np.linalg.matrix_power(once, block.repeat)
        self._blocks[id(block)] = (block, U)
        return U

    def diagonal(self, key) -> np.ndarray:
        key = normalize_key(self.model, key)
        if key not in self._diag:
            self._diag[key] = cphase_diagonal(self.model, self.domain, key, self.W)
        return self._diag[key]


@dataclass(frozen=True)
class TwoQubitPhase:
    """``exp(-i T A^C)`` for the class ``key``."""

    key: tuple | int
    T: float
    level: int = 0
    kind = "phase"

    def apply(self, state, ctx: PulseContext):
        return apply_diagonal_phase(state, ctx.diagonal(self.key), self.T)

    def to_json(self) -> dict:
        key = list(self.key) if isinstance(self.key, tuple) else self.key
        return {"kind": "phase", "key": key, "T": self.T, "level": self.level}


@dataclass(frozen=True)
class OneQubitGlobal:
    """``exp(X^diamond)`` with ``X = [[0, z], [-conj z, 0]]``."""

    z: complex
    level: int = 0
    kind = "global"

    def apply(self, state, ctx: PulseContext):
        return apply_tensor_local(state, self.z, ctx.site_weights)

    def to_json(self) -> dict:
        return {"kind": "global", "z": [self.z.real, self.z.imag], "level": self.level}


@dataclass(frozen=True)
class LocalSlot:
    """A one-qubit gate at ``site`` to be realised by a compiled sequence.

    Simulation applies ``U`` exactly; ``budget`` is the error the compiled
    replacement is allowed, and ``keys`` the classes it would pulse.
    """

    site: tuple
    U: tuple  # 2x2 as nested tuples of complex
    budget: float = 0.0
    refs: tuple = ()
    keys: tuple = ()
    label: str = ""
    level: int = 0
    kind = "local"

    @classmethod
    def make(cls, site, U, **kw) -> "LocalSlot":
        U = np.asarray(U, dtype=complex)
        return cls(as_point(site), tuple(tuple(complex(x) for x in row) for row in U), **kw)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.U, dtype=complex)

    def apply(self, state, ctx: PulseContext):
        return apply_local(state, self.matrix, ctx.domain.index(self.site), ctx.n)

    def to_json(self) -> dict:
        return {"kind": "local", "site": list(self.site),
                "U": [[[x.real, x.imag] for x in row] for row in self.U],
                "budget": self.budget, "refs": [list(r) for r in self.refs],
                "keys": [list(k) if isinstance(k, tuple) else k for k in self.keys],
                "label": self.label, "level": self.level}


Pulse = TwoQubitPhase | OneQubitGlobal | LocalSlot


@dataclass(frozen=True)
class Block:
    children: tuple = ()
    repeat: int = 1

    def __len__(self) -> int:
        return self.repeat * sum(1 if not isinstance(c, Block) else len(c) for c in self.children)

    def __iter__(self) -> Iterator[Pulse]:
        for _ in range(self.repeat):
            for c in self.children:
                if isinstance(c, Block):
                    yield from c
                else:
                    yield c

    def distinct_pulses(self) -> set:
        """Pulses appearing anywhere in the tree, without expanding repeats."""
        out, seen, stack = set(), set(), [self]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            for c in node.children:
                (stack.append(c) if isinstance(c, Block) else out.add(c))
        return out

    def apply(self, state, ctx: PulseContext):
        if ctx.dense_blocks and len(self) > 4:
            return ctx.block_unitary(self) @ state
        for _ in range(self.repeat):
            for c in self.children:
                state = c.apply(state, ctx)
        return state


def concat(*nodes) -> Block:
    kids = []
    for n in nodes:
        if n is None:
            continue
        if isinstance(n, Block) and n.repeat == 1:
            kids.extend(n.children)
        elif isinstance(n, Block) and len(n) == 0:
            continue
        else:
            kids.append(n)
    return Block(tuple(kids), 1)


@dataclass
class LevelRecord:
    level: int
    epsilon: float
    N: int
    M: float
    bound: float  # group-commutator bound c M^3 / sqrt(N)
    certified: bool = True  # N from the a-priori schedule (fixed mode: False)
    n_exceeds_m2: bool = True

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class PulseSequence:
    root: Block
    target: list = field(default_factory=list)  # ideal ops, see ``target_ops``
    epsilon: float = 0.0
    budget_trace: list = field(default_factory=list)
    expected_length: int | None = None
    length_upper_bound: int | None = None
    c: float | None = None
    certified: bool = True
    notes: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.root)

    def __iter__(self):
        return iter(self.root)

    @classmethod
    def empty(cls, target=None, epsilon=0.0) -> "PulseSequence":
        return cls(Block(), target or [], epsilon, [], 0, 0)

    def keys_used(self) -> set:
        """Classes pulsed directly or through compiled local slots."""
        out = set()
        for pulse in self.root.distinct_pulses():
            if isinstance(pulse, TwoQubitPhase):
                out.add(pulse.key)
            elif isinstance(pulse, LocalSlot):
                out.update(pulse.keys)
        return out

    def max_offset(self) -> int:
        """Largest ``|j|`` over translation keys used (0 if none)."""
        vals = [max(abs(c) for c in k) if isinstance(k, tuple) else int(np.sqrt(k)) for k in self.keys_used()]
        return max(vals, default=0)

    def allotted_error(self) -> float:
        """Sum of the error budgets handed to the constituent gates."""
        return sum(g["epsilon"] for g in self.budget_trace)

    def trace_json(self) -> dict:
        return {
            "length": len(self),
            "expected_length": self.expected_length,
            "length_upper_bound": self.length_upper_bound,
            "epsilon": self.epsilon,
            "c": self.c,
            "certified": self.certified,
            "budget_trace": self.budget_trace,
            "target": self.target,
            "notes": self.notes,
        }
