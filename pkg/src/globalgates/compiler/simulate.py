"""Apply sequences to admissible basis columns and measure the block error."""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..extraction import admissible_indices
from ..geometry import as_point
from ..quantum import apply_local, phase_aligned_distance
from ..schemes import Scheme
from .pulses import PulseContext


def thread_count(threads: int | None = None) -> int:
    if threads:
        return max(1, int(threads))
    return max(1, int(os.environ.get("GGC_THREADS", "1")))


def decode_matrix(U) -> np.ndarray:
    return np.array([[complex(*x) if isinstance(x, (list, tuple)) else complex(x) for x in row] for row in U])


def apply_target(ops: list, state: np.ndarray, ctx: PulseContext) -> np.ndarray:
    """Ideal action of the declared target operations, in order."""
    idx = np.arange(state.shape[0])
    for op in ops:
        if op["op"] == "local":
            state = apply_local(state, decode_matrix(op["U"]), ctx.domain.index(as_point(op["site"])), ctx.n)
        elif op["op"] == "pair_phase":
            # exp(-i phi n_p n_q)
            i, j = ctx.domain.index(as_point(op["p"])), ctx.domain.index(as_point(op["q"]))
            mask = ((idx >> i) & (idx >> j) & 1).astype(bool)
            phase = np.where(mask, np.exp(-1j * op["phi"]), 1.0)
            state = state * (phase[:, None] if state.ndim == 2 else phase)
        else:
            raise ValueError(f"unknown target op {op['op']!r}")
    return state


def _run(sequence, cols: np.ndarray, ctx: PulseContext, threads: int) -> np.ndarray:
    if threads <= 1 or cols.shape[1] < 2:
        return sequence.root.apply(cols, ctx)
    chunks = np.array_split(np.arange(cols.shape[1]), threads)
    with ThreadPoolExecutor(threads) as ex:
        parts = list(ex.map(lambda c: sequence.root.apply(cols[:, c], ctx), [c for c in chunks if len(c)]))
    return np.concatenate(parts, axis=1)


@dataclass
class SimulationReport:
    distance: float
    phase: float
    leakage: float
    admissible_dim: int
    length: int
    wall_time: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def simulate_sequence(scheme: Scheme, sequence, ctx: PulseContext, threads: int | None = None) -> SimulationReport:
    """Phase-aligned operator-norm error on the admissible block, plus leakage."""
    adm = admissible_indices(scheme)
    dim = 2**scheme.domain.n
    cols = np.zeros((dim, len(adm)), dtype=complex)
    cols[adm, np.arange(len(adm))] = 1.0
    t0 = time.perf_counter()
    out = _run(sequence, cols, ctx, thread_count(threads))
    wall = time.perf_counter() - t0
    want = apply_target(sequence.target, cols, ctx)
    # rows reached by the ideal action: the admissible set, moved if the base moved
    rows = np.flatnonzero(np.any(np.abs(want) > 1e-12, axis=1))
    dist, phi = phase_aligned_distance(out[rows, :], want[rows, :])
    mask = np.ones(dim, dtype=bool)
    mask[rows] = False
    leak = float(np.linalg.norm(out[mask, :], 2)) if mask.any() else 0.0
    return SimulationReport(dist, phi, leak, len(adm), len(sequence), wall)
