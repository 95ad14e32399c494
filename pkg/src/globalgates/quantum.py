"""State vectors and operators over a qubit domain.

Basis states are indexed little-endian: qubit ``i`` (the ``i``-th point of
the domain in canonical order) is bit ``i`` of the integer index.  In
Kronecker-product terms qubit ``n - 1`` is the leftmost factor.

Two backends coexist.  The structured one keeps diagonal generators as
vectors and applies tensor-local pulses site by site; it is what simulation
uses.  The explicit one builds (sparse or dense) matrices straight from the
entrywise definitions of local and global operators and only serves as a
verification oracle.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize_scalar

from .geometry import Domain, GroupModel, class_members, normalize_key

DENSE_CAP = 14

# controlled phase shift Hamiltonian; rows/cols ordered 00, 01, 10, 11
CPHASE = np.diag([0.0, 0.0, 0.0, 1.0]).astype(complex)
RAISE = np.array([[0, 1], [0, 0]], dtype=complex)


def config_to_index(bits) -> int:
    return sum(int(b) << i for i, b in enumerate(bits))


def index_to_config(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> i) & 1 for i in range(n))


def delete_bit(index: int, i: int) -> int:
    """Zero bit ``i`` of a basis index."""
    return index & ~(1 << i)


def xy_generator(z: complex) -> np.ndarray:
    """The anti-Hermitian 2x2 matrix ``[[0, z], [-conj(z), 0]]``."""
    return np.array([[0, z], [-np.conj(z), 0]], dtype=complex)


def xy_rotation(z: complex) -> np.ndarray:
    """Closed form of ``exp([[0, z], [-conj(z), 0]])``."""
    r = abs(z)
    if r == 0:
        return np.eye(2, dtype=complex)
    u = z / r
    c, s = np.cos(r), np.sin(r)
    return np.array([[c, u * s], [-np.conj(u) * s, c]], dtype=complex)


@dataclass(frozen=True)
class BalanceFunction:
    """Positive weights; ``matrix[i, i]`` is the site weight of qubit ``i``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("balance matrix must be square")
        if np.any(m <= 0):
            raise ValueError("balance weights must be positive")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def constant(cls, n: int, value: float = 1.0) -> "BalanceFunction":
        return cls(np.full((n, n), float(value)))

    @classmethod
    def random(cls, n: int, lo: float = 1.0, hi: float = 2.0, seed: int = 0) -> "BalanceFunction":
        rng = np.random.default_rng(seed)
        return cls(rng.uniform(lo, hi, size=(n, n)))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def site(self, i: int) -> float:
        return float(self.matrix[i, i])

    def pair(self, i: int, j: int) -> float:
        return float(self.matrix[i, j])

    @property
    def sites(self) -> np.ndarray:
        return np.diag(self.matrix).copy()

    @property
    def ratio(self) -> float:
        """Worst-case ratio ``w`` between any two weights."""
        return float(self.matrix.max() / self.matrix.min())

    def to_json(self):
        m = self.matrix
        if np.all(m == m.flat[0]):
            return {"constant": float(m.flat[0])}
        return {"table": m.tolist()}

    @classmethod
    def from_json(cls, d, n: int) -> "BalanceFunction":
        if d is None:
            return cls.constant(n)
        if "constant" in d:
            return cls.constant(n, d["constant"])
        if "random" in d:
            r = d["random"]
            return cls.random(n, r.get("lo", 1.0), r.get("hi", 2.0), r.get("seed", 0))
        return cls(np.array(d["table"], dtype=float))


# --- explicit (oracle) construction --------------------------------------------


def _check_dense(n: int):
    if n > DENSE_CAP:
        raise ValueError(f"explicit operators are capped at n = {DENSE_CAP} qubits (got {n})")


def embed_one(M: np.ndarray, i: int, n: int) -> sp.csr_matrix:
    """``M^p`` for qubit ``i`` built as a Kronecker product."""
    _check_dense(n)
    left = sp.identity(2 ** (n - 1 - i), format="csr", dtype=complex)
    right = sp.identity(2**i, format="csr", dtype=complex)
    return sp.kron(sp.kron(left, sp.csr_matrix(M)), right, format="csr")


def embed_two(M: np.ndarray, i: int, j: int, n: int) -> sp.csr_matrix:
    """``M^(p,q)`` built entrywise from its definition (rows ``(a_p, a_q)``)."""
    _check_dense(n)
    if i == j:
        raise ValueError("two-qubit embedding needs distinct sites")
    dim = 2**n
    rows, cols, vals = [], [], []
    idx = np.arange(dim)
    base = idx & ~((1 << i) | (1 << j))
    ai = (idx >> i) & 1
    aj = (idx >> j) & 1
    for bp in (0, 1):
        for bq in (0, 1):
            b = base | (bp << i) | (bq << j)
            v = M[2 * ai + aj, 2 * bp + bq]
            nz = v != 0
            rows.append(idx[nz])
            cols.append(b[nz])
            vals.append(v[nz])
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(dim, dim))


def global_one_qubit(M: np.ndarray, W: BalanceFunction, dense: bool = False):
    """``M^diamond = sum_p W(p) M^p``."""
    n = W.n
    out = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for i in range(n):
        out = out + W.site(i) * embed_one(M, i, n)
    return out.toarray() if dense else out


def global_two_qubit(M: np.ndarray, model: GroupModel, domain: Domain, key, W: BalanceFunction,
                     dense: bool = False):
    """``M^C = sum_{(p,q) in C} W(p,q) M^(p,q)``; zero when the class is empty."""
    n = domain.n
    out = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for p, q in class_members(model, domain, key):
        i, j = domain.index(p), domain.index(q)
        out = out + W.pair(i, j) * embed_two(M, i, j, n)
    return out.toarray() if dense else out


# --- structured backend ---------------------------------------------------------------


def cphase_diagonal(model: GroupModel, domain: Domain, key, W: BalanceFunction) -> np.ndarray:
    """Diagonal of ``A^C``: entry ``a`` sums ``W(p,q)`` over class pairs with ``a_p = a_q = 1``."""
    n = domain.n
    idx = np.arange(2**n)
    d = np.zeros(2**n)
    for p, q in class_members(model, domain, normalize_key(model, key)):
        i, j = domain.index(p), domain.index(q)
        d += W.pair(i, j) * (((idx >> i) & (idx >> j)) & 1)
    return d


def apply_diagonal_phase(state: np.ndarray, diagonal: np.ndarray, T: float) -> np.ndarray:
    """``exp(-i T diag) state``; works on a vector or a column block."""
    phase = np.exp(-1j * T * diagonal)
    if state.ndim == 1:
        return state * phase
    return state * phase[:, None]


def apply_local(state: np.ndarray, U: np.ndarray, i: int, n: int) -> np.ndarray:
    """Apply a 2x2 matrix to qubit ``i`` of a vector or column block."""
    m = 1 if state.ndim == 1 else state.shape[1]
    psi = state.reshape(2 ** (n - 1 - i), 2, (2**i) * m)
    out = np.einsum("ab,xbk->xak", U, psi)
    return out.reshape(state.shape)


def apply_tensor_local(state: np.ndarray, z: complex, site_weights: np.ndarray) -> np.ndarray:
    """``exp(X^diamond)`` for ``X = [[0, z], [-conj z, 0]]`` as per-site rotations."""
    n = len(site_weights)
    out = state
    for i, w in enumerate(site_weights):
        out = apply_local(out, xy_rotation(w * z), i, n)
    return out


def apply_pulse(state: np.ndarray, pulse, ctx) -> np.ndarray:
    """Apply an executable pulse using the structured backend.

    ``ctx`` supplies ``diagonal(key)`` and ``site_weights``; see
    :class:`globalgates.compiler.pulses.PulseContext`.
    """
    if state.ndim == 1:
        nrm = np.linalg.norm(state)
        if abs(nrm - 1) > 1e-9:
            warnings.warn(f"state not normalised (norm {nrm:.3g})", RuntimeWarning, stacklevel=2)
    return pulse.apply(state, ctx)


# --- linear algebra helpers ------------------------------------------------------------


def commutator(A, B):
    """``AB - BA``.  A 1-D ``A`` is read as a diagonal: ``(d_a - d_b) B_ab``."""
    if isinstance(A, np.ndarray) and A.ndim == 1:
        if sp.issparse(B):
            B = B.tocoo()
            vals = (A[B.row] - A[B.col]) * B.data
            return sp.csr_matrix((vals, (B.row, B.col)), shape=B.shape)
        return (A[:, None] - A[None, :]) * B
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch {A.shape} vs {B.shape}")
    return A @ B - B @ A


def operator_norm(M) -> float:
    """Largest singular value."""
    if sp.issparse(M):
        M = M.toarray()
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def is_hermitian(M, tol: float = 1e-10) -> bool:
    M = M.toarray() if sp.issparse(M) else np.asarray(M)
    return bool(np.max(np.abs(M - M.conj().T), initial=0.0) <= tol)


def is_unitary(U, tol: float = 1e-9) -> bool:
    U = np.asarray(U)
    return bool(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[1]))) <= tol)


def exp_skew_hermitian(H, scale: float = 1.0) -> np.ndarray:
    """``exp(scale * H)`` for anti-Hermitian ``H`` via the eigenbasis of ``iH``."""
    H = H.toarray() if sp.issparse(H) else np.asarray(H, dtype=complex)
    K = 1j * H
    if not is_hermitian(K, 1e-10 * max(1.0, np.abs(K).max(initial=0.0))):
        raise ValueError("generator is not anti-Hermitian")
    K = (K + K.conj().T) / 2
    vals, vecs = np.linalg.eigh(K)
    return (vecs * np.exp(-1j * scale * vals)) @ vecs.conj().T


def phase_aligned_distance(A: np.ndarray, B: np.ndarray) -> tuple[float, float]:
    """``min_phi ||A - e^{i phi} B||`` (spectral norm) and the minimising phase."""
    A = np.asarray(A)
    B = np.asarray(B)

    def f(phi):
        return operator_norm(A - np.exp(1j * phi) * B)

    # the trace phase is optimal when A and B nearly agree
    grid = np.append(np.linspace(-np.pi, np.pi, 73), np.angle(np.vdot(B, A)))
    vals = [f(x) for x in grid]
    j = int(np.argmin(vals))
    step = 2 * np.pi / 72
    res = minimize_scalar(f, bounds=(grid[j] - step, grid[j] + step), method="bounded",
                          options={"xatol": 1e-12})
    if res.fun < vals[j]:
        return float(res.fun), float(res.x)
    return float(vals[j]), float(grid[j])
