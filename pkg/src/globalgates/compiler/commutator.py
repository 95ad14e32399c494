"""Group-commutator products and the error-versus-N sweep."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from ..quantum import operator_norm, phase_aligned_distance
from .pulses import Block


class RepetitionError(ValueError):
    """``N`` does not exceed ``M^2``."""


def _M(X, Y) -> float:
    return max(operator_norm(X), operator_norm(Y), 1.0)


def group_commutator_product(X: np.ndarray, Y: np.ndarray, N: int) -> np.ndarray:
    """``(e^{iX/sqrt N} e^{iY/sqrt N} e^{-iX/sqrt N} e^{-iY/sqrt N})^N`` for Hermitian X, Y.

    Approximates ``exp([-iX, -iY])``.
    """
    M = _M(X, Y)
    if N <= M * M:
        raise RepetitionError(f"N = {N} must exceed M^2 = {M * M:.4g}")
    s = 1.0 / math.sqrt(N)
    ex, ey = expm(1j * s * X), expm(1j * s * Y)
    step = ex @ ey @ ex.conj().T @ ey.conj().T
    return np.linalg.matrix_power(step, N)


def commutator_target(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    A, B = -1j * X, -1j * Y
    return expm(A @ B - B @ A)


def group_commutator_block(x_fwd, x_bwd, y_fwd, y_bwd, N: int, M: float) -> Block:
    """Pulse-level version: ``*_fwd`` realise ``e^{-i./sqrt N}``, ``*_bwd`` the inverses.

    Emitted in time order ``y_fwd, x_fwd, y_bwd, x_bwd`` repeated ``N`` times.
    """
    if N <= M * M:
        raise RepetitionError(f"N = {N} must exceed M^2 = {M * M:.4g}")
    return Block((y_fwd, x_fwd, y_bwd, x_bwd), N)


def random_hermitian(dim: int, rng: np.random.Generator, norm: float = 1.0) -> np.ndarray:
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    H = (A + A.conj().T) / 2
    return H * (norm / operator_norm(H))


@dataclass
class SweepResult:
    Ns: list
    rows: list = field(default_factory=list)  # (instance, qubits, N, M, error)
    slope: float = float("nan")
    slopes: list = field(default_factory=list)
    c_fit: float = float("nan")
    c_calibrated: float = float("nan")

    def to_json(self) -> dict:
        return {"Ns": self.Ns, "slope": self.slope, "slopes": self.slopes, "c_fit": self.c_fit,
                "c_calibrated": self.c_calibrated,
                "rows": [dict(zip(("instance", "qubits", "N", "M", "error"), r)) for r in self.rows]}

    def to_csv(self) -> str:
        lines = ["instance,qubits,N,M,error"]
        lines += [f"{a},{b},{c},{d:.6g},{e:.6e}" for a, b, c, d, e in self.rows]
        return "\n".join(lines) + "\n"


def commutator_sweep(Ns=tuple(4**j for j in range(2, 9)), instances: int = 6, qubits=(2, 3),
                     seed: int = 0, norm: float = 1.0, safety: float = 2.0) -> SweepResult:
    """Measure the product error on random Hermitian pairs and fit its decay.

    The slope is a least-squares fit of ``log error`` against ``log N`` over all
    rows; ``c`` is the largest ``error sqrt(N) / M^3`` seen, times ``safety``.
    """
    rng = np.random.default_rng(seed)
    res = SweepResult(list(Ns))
    for inst in range(instances):
        q = qubits[inst % len(qubits)]
        X, Y = random_hermitian(2**q, rng, norm), random_hermitian(2**q, rng, norm)
        M = _M(X, Y)
        target = commutator_target(X, Y)
        errs = []
        for N in Ns:
            err = operator_norm(group_commutator_product(X, Y, N) - target)
            errs.append(err)
            res.rows.append((inst, q, N, M, err))
        res.slopes.append(float(np.polyfit(np.log(Ns), np.log(errs), 1)[0]))
    logs = np.array([[math.log(r[2]), math.log(r[4])] for r in res.rows])
    res.slope = float(np.polyfit(logs[:, 0], logs[:, 1], 1)[0])
    ratios = [r[4] * math.sqrt(r[2]) / r[3] ** 3 for r in res.rows]
    res.c_fit = float(max(ratios))
    res.c_calibrated = safety * res.c_fit
    return res


def aligned_error(A, B) -> float:
    return phase_aligned_distance(A, B)[0]
