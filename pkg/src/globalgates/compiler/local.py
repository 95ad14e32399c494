"""Compilation of single-site gates into global pulses.

The target ``exp(X^p)`` with ``X = [[0, z], [-conj z, 0]]`` is reached by the
recursion ``Y_i = [-i X_i, Y_{i+1}]`` with ``X_i = A^{C_i} / W_i`` and
``Y_{k+1} = X'^diamond / W(p)``, where ``z'`` is chosen so that ``Y_1`` equals
``X^p`` on admissible states.  Each ``exp(t Y_i)`` is approximated by a group
commutator of ``exp(t X_i)``-type phase pulses and approximations of
``exp(+-Y_{i+1}/sqrt(N_i))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..extraction import AddressError, extraction_plan, source_amplitude
from ..geometry import as_point, class_members
from ..quantum import (
    CPHASE,
    BalanceFunction,
    commutator,
    global_one_qubit,
    global_two_qubit,
    operator_norm,
    xy_generator,
    xy_rotation,
)
from ..schemes import Scheme, is_addressable
from .pulses import Block, LevelRecord, OneQubitGlobal, PulseContext, PulseSequence, TwoQubitPhase, concat

N_CAP = 10**6
EXACT_NORM_MAX_QUBITS = 10


class BudgetUnderflow(RuntimeError):
    """The requested accuracy needs more repetitions than the cap allows."""

    def __init__(self, message: str, level: int, required: int, trace: list):
        super().__init__(message)
        self.level = level
        self.required = required
        self.trace = trace


@dataclass
class Budget:
    """How repetition counts are chosen.

    ``apriori`` derives each ``N_i`` from the group-commutator bound and is
    certified.  ``fixed`` uses the given counts and only reports the bound.
    """

    mode: str = "apriori"
    N: tuple = ()
    c: float = 2.0
    cap: int = N_CAP
    norms: str = "auto"  # "bound", "exact" or "auto"

    def __post_init__(self):
        if self.mode not in ("apriori", "fixed"):
            raise ValueError(f"unknown budget mode {self.mode!r}")
        if self.c <= 0:
            raise ValueError("c must be positive")


def required_repetitions(M: float, eps: float, c: float) -> int:
    """Smallest ``N`` with ``c M^3 / sqrt(N) <= eps / 2`` and ``N > M^2``."""
    return max(math.ceil((2 * c * M**3 / eps) ** 2), math.floor(M * M) + 1)


def exact_length(Ns) -> int:
    """Pulses emitted for repetition counts ``N_1..N_k`` (leaf is one pulse)."""
    L = 1
    for N in reversed(list(Ns)):
        L = 2 * N * (1 + L)
    return L


def product_count_bound(Ns) -> int:
    """``4N_1 + 4N_1 4N_2 + ... + 4N_1...4N_k``; an upper bound on the length."""
    total, prod = 0, 1
    for N in Ns:
        prod *= 4 * N
        total += prod
    return total


@dataclass
class _LevelData:
    key: object
    W_i: float
    x_norm: float  # ||X_i|| = ||A^{C_i}|| / W_i


@dataclass
class LocalPlan:
    p: tuple
    refs: tuple
    z: complex
    z_leaf: complex
    site_weight: float
    levels: list
    y_norms: list  # ||Y_1||, ..., ||Y_{k+1}||
    norms_exact: bool
    Ns: list = field(default_factory=list)
    trace: list = field(default_factory=list)


def _y_norms(scheme: Scheme, plan, levels, z_leaf, W, exact: bool) -> list[float]:
    n = scheme.domain.n
    k = len(levels)
    top = float(np.sum(W.sites)) * abs(z_leaf) / plan.site_weight
    if not exact:
        norms = [top]
        for lv in reversed(levels):
            norms.append(2 * lv.x_norm * norms[-1])
        return list(reversed(norms))
    Y = global_one_qubit(xy_generator(z_leaf), W) / plan.site_weight
    norms = [operator_norm(Y)]
    for lv in reversed(levels):
        A = global_two_qubit(CPHASE, scheme.model, scheme.domain, lv.key, W) / lv.W_i
        Y = commutator(-1j * A, Y)
        norms.append(operator_norm(Y))
    assert len(norms) == k + 1 and n <= EXACT_NORM_MAX_QUBITS
    return list(reversed(norms))


def plan_local(scheme: Scheme, p, refs, z: complex, W: BalanceFunction, budget: Budget,
               ctx: PulseContext) -> LocalPlan:
    plan = extraction_plan(scheme, p, refs, W)
    D = scheme.domain
    levels = []
    for key, Wi in zip(plan.keys, plan.weights):
        if Wi == 0:
            raise AddressError(f"class {key} has no base partner of {plan.p}")
        # the all-ones configuration maximises the diagonal of A^C
        weight = sum(W.pair(D.index(a), D.index(b)) for a, b in class_members(scheme.model, D, key))
        levels.append(_LevelData(key, Wi, weight / Wi))
    z_leaf = source_amplitude(z, plan.k)
    exact = budget.norms == "exact" or (budget.norms == "auto" and scheme.domain.n <= EXACT_NORM_MAX_QUBITS)
    y_norms = _y_norms(scheme, plan, levels, z_leaf, W, exact)
    return LocalPlan(plan.p, plan.refs, z, z_leaf, plan.site_weight, levels, y_norms, exact)


def schedule(lp: LocalPlan, epsilon: float, budget: Budget) -> None:
    """Fill ``lp.Ns`` and ``lp.trace``; raise :class:`BudgetUnderflow` if over the cap."""
    k = len(lp.levels)
    eps = epsilon
    t = 1.0
    if budget.mode == "fixed" and len(budget.N) != k:
        raise ValueError(f"fixed budget needs {k} repetition counts, got {len(budget.N)}")
    for i, lv in enumerate(lp.levels):
        M = max(abs(t) * lv.x_norm, lp.y_norms[i + 1], 1.0)
        if budget.mode == "apriori":
            N = required_repetitions(M, eps, budget.c)
            if N > budget.cap:
                lp.trace.append(LevelRecord(i + 1, eps, N, M, budget.c * M**3 / math.sqrt(N)).to_json())
                raise BudgetUnderflow(
                    f"level {i + 1} needs N = {N} > cap {budget.cap} (M = {M:.4g}, eps = {eps:.3g})",
                    i + 1, N, lp.trace)
            certified = True
        else:
            N = int(budget.N[i])
            certified = False
        bound = budget.c * M**3 / math.sqrt(N)
        lp.trace.append(LevelRecord(i + 1, eps, N, M, bound, certified, N > M * M).to_json())
        lp.Ns.append(N)
        eps = eps / (4 * N)
        t = 1.0 / math.sqrt(N)


def build_tree(lp: LocalPlan):
    """Pulse tree approximating ``exp(Y_1)``."""
    k = len(lp.levels)
    cache: dict = {}

    def node(i: int, sgn: int):
        # approximates exp(t Y_i), t = sgn (i == 0) or sgn / sqrt(N_{i-1})
        if (i, sgn) in cache:
            return cache[(i, sgn)]
        t = sgn * (1.0 if i == 0 else 1.0 / math.sqrt(lp.Ns[i - 1]))
        if i == k:
            out = OneQubitGlobal(complex(t * lp.z_leaf / lp.site_weight), level=k + 1)
        else:
            lv, N = lp.levels[i], lp.Ns[i]
            T = t / (lv.W_i * math.sqrt(N))
            # time order: e^{-iY}, e^{-iX}, e^{+iY}, e^{+iX} with X = t X_i, Y = i Y_{i+1}
            out = Block((node(i + 1, +1), TwoQubitPhase(lv.key, T, i + 1),
                         node(i + 1, -1), TwoQubitPhase(lv.key, -T, i + 1)), N)
        cache[(i, sgn)] = out
        return out

    root = node(0, +1)
    return root if isinstance(root, Block) else Block((root,), 1)


def local_target(p, U) -> dict:
    U = np.asarray(U, dtype=complex)
    return {"op": "local", "site": list(as_point(p)), "U": [[[x.real, x.imag] for x in row] for row in U]}


def _check_epsilon(epsilon: float):
    if not (0 < epsilon < 1):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")


def compile_local_xy_gate(scheme: Scheme, p, refs, z: complex, epsilon: float,
                          W: BalanceFunction | None = None, budget: Budget | None = None,
                          ctx: PulseContext | None = None, require_address: bool = True) -> PulseSequence:
    """Pulses approximating ``exp([[0, z], [-conj z, 0]])`` at ``p`` on admissible states."""
    _check_epsilon(epsilon)
    z = complex(z)
    if abs(z) > 1 + 1e-12:
        raise ValueError(f"|z| must be at most 1, got {abs(z):.6g}")
    p = as_point(p)
    refs = tuple(as_point(r) for r in refs)
    W = W or BalanceFunction.constant(scheme.domain.n)
    budget = budget or Budget()
    target = [local_target(p, xy_rotation(z))]
    if z == 0:
        return PulseSequence.empty(target, epsilon)
    cert = is_addressable(scheme, p, refs)
    if require_address and not cert.ok:
        raise AddressError(f"{p} is not addressable by {refs}: counterexample {cert.counterexample}")
    ctx = ctx or PulseContext(scheme.model, scheme.domain, W)
    lp = plan_local(scheme, p, refs, z, W, budget, ctx)
    schedule(lp, epsilon, budget)
    root = build_tree(lp)
    seq = PulseSequence(root, target, epsilon, [{"gate": target[0], "epsilon": epsilon,
                                                   "levels": lp.trace, "norms_exact": lp.norms_exact}],
                        exact_length(lp.Ns), product_count_bound(lp.Ns), budget.c,
                        budget.mode == "apriori" and cert.ok)
    if not cert.ok:
        seq.notes.append("references do not address the target; extraction identity not guaranteed")
    return seq


# --- arbitrary one-qubit gates ---------------------------------------------------

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def rx(theta: float) -> np.ndarray:
    return xy_rotation(-0.5j * theta)


def ry(theta: float) -> np.ndarray:
    return xy_rotation(-0.5 * theta)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _wrap(a: float) -> float:
    return (a + math.pi) % (2 * math.pi) - math.pi


def _zyz(V: np.ndarray) -> tuple[float, float, float]:
    a, b = V[0, 0], V[0, 1]
    beta = 2 * math.atan2(abs(b), abs(a))
    s = np.angle(a) if abs(a) > 1e-15 else 0.0
    d = np.angle(-b) if abs(b) > 1e-15 else 0.0
    # -(alpha + gamma)/2 = arg a ; -(alpha - gamma)/2 = arg(-b)
    return -(s + d), beta, -(s - d)


def euler_xyx(U: np.ndarray, tol: float = 1e-12) -> tuple[float, float, float]:
    """Angles with ``U ~ Rx(a) Ry(b) Rx(c)`` up to phase, minimising ``|a|+|b|+|c|``."""
    U = np.asarray(U, dtype=complex)
    if not np.allclose(U.conj().T @ U, np.eye(2), atol=1e-9):
        raise ValueError("matrix is not unitary")
    V = U / np.sqrt(np.linalg.det(U))
    alpha, beta, gamma = _zyz(_H @ V @ _H)
    # H Rz H = Rx, H Ry H = Ry(-)
    a, b, c = alpha, -beta, gamma
    cands = []
    for da, db, dc in ((0, 0, 0), (math.pi, None, math.pi)):
        if db is None:
            cands.append((_wrap(a + da), _wrap(-b), _wrap(c + dc)))
        else:
            cands.append((_wrap(a), _wrap(b), _wrap(c)))
    cands.sort(key=lambda x: (round(sum(map(abs, x)), 12), x))
    for ang in cands:
        W = rx(ang[0]) @ ry(ang[1]) @ rx(ang[2])
        ph = np.vdot(W.ravel(), U.ravel())
        if abs(abs(ph) - 2) < 1e-9 and np.max(np.abs(W * ph / abs(ph) - U)) < max(tol, 1e-10):
            return tuple(0.0 if abs(x) < tol else float(x) for x in ang)
    raise ArithmeticError("Euler decomposition failed to converge")  # pragma: no cover


def rotation_amplitudes(U: np.ndarray) -> list[complex]:
    """``z`` values, in time order, whose rotations compose to ``U`` (|z| <= 1 each)."""
    a, b, c = euler_xyx(U)
    if b == 0:
        a, c = _wrap(a + c), 0.0
    out = []
    for ang, axis in ((c, "x"), (b, "y"), (a, "x")):
        if ang == 0:
            continue
        z = -0.5j * ang if axis == "x" else -0.5 * ang
        pieces = max(1, math.ceil(abs(z) - 1e-12))
        out.extend([z / pieces] * pieces)
    return out


def compile_local_unitary(scheme: Scheme, p, refs, U, epsilon: float, **kw) -> PulseSequence:
    """Compile any one-qubit gate at ``p`` (global phase ignored)."""
    _check_epsilon(epsilon)
    U = np.asarray(U, dtype=complex)
    zs = rotation_amplitudes(U)
    target = [local_target(p, U)]
    if not zs:
        return PulseSequence.empty(target, epsilon)
    share = epsilon / len(zs)
    parts = [compile_local_xy_gate(scheme, p, refs, z, share, **kw) for z in zs]
    root = concat(*(s.root for s in parts))
    return PulseSequence(
        root, target, epsilon, [t for s in parts for t in s.budget_trace],
        sum(s.expected_length for s in parts), sum(s.length_upper_bound for s in parts),
        parts[0].c, all(s.certified for s in parts), [n for s in parts for n in s.notes])
