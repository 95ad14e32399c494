import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from globalgates.geometry import Domain, TranslationLattice
from globalgates.quantum import (
    CPHASE,
    BalanceFunction,
    apply_local,
    apply_tensor_local,
    commutator,
    cphase_diagonal,
    embed_one,
    embed_two,
    exp_skew_hermitian,
    global_one_qubit,
    global_two_qubit,
    index_to_config,
    config_to_index,
    is_unitary,
    phase_aligned_distance,
    xy_generator,
    xy_rotation,
)

complexes = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


def random_unitary(rng, d=2):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / abs(np.diag(r)))


@given(complexes)
def test_xy_rotation_closed_form(z):
    assert np.allclose(xy_rotation(z), expm(xy_generator(z)), atol=1e-12)
    assert is_unitary(xy_rotation(z))


def test_bit_helpers_roundtrip():
    for a in range(32):
        assert config_to_index(index_to_config(a, 5)) == a


def test_embed_one_matches_bit_convention():
    n = 4
    M = embed_one(np.array([[0, 1], [0, 0]]), 2, n).toarray()
    # |..1..> -> |..0..> on qubit 2
    assert M[0b0000, 0b0100] == 1
    assert np.count_nonzero(M) == 8


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 5), st.data())
def test_apply_local_matches_kron(n, data):
    i = data.draw(st.integers(0, n - 1))
    rng = np.random.default_rng(data.draw(st.integers(0, 999)))
    U = random_unitary(rng)
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    assert np.allclose(apply_local(psi, U, i, n), embed_one(U, i, n) @ psi)
    block = rng.normal(size=(2**n, 3)) + 0j
    assert np.allclose(apply_local(block, U, i, n), embed_one(U, i, n) @ block)


def test_embed_two_rows_follow_pair_order():
    n = 3
    M = np.zeros((4, 4))
    M[2, 0] = 1  # |00> -> |10> on (p, q): sets bit p
    E = embed_two(M, 0, 2, n).toarray()
    assert E[0b001, 0b000] == 1


@settings(max_examples=15, deadline=None)
@given(st.integers(3, 6), st.integers(1, 3), st.integers(0, 100))
def test_cphase_diagonal_matches_explicit(n, off, seed):
    model = TranslationLattice(1)
    D = Domain.interval(0, n - 1)
    W = BalanceFunction.random(n, 1, 2, seed)
    explicit = global_two_qubit(CPHASE, model, D, (off,), W).toarray()
    d = cphase_diagonal(model, D, (off,), W)
    assert np.allclose(np.diag(d), explicit)


def test_global_one_qubit_is_tensor_product_exponential():
    n = 4
    W = BalanceFunction.random(n, 1, 2, 3)
    z = 0.3 - 0.4j
    G = global_one_qubit(xy_generator(z), W, dense=True)
    psi = np.random.default_rng(0).normal(size=2**n) + 0j
    assert np.allclose(expm(G) @ psi, apply_tensor_local(psi, z, W.sites))


def test_empty_class_gives_zero():
    D = Domain.interval(0, 2)
    assert global_two_qubit(CPHASE, TranslationLattice(1), D, (7,), BalanceFunction.constant(3)).nnz == 0


def test_commutator_diagonal_fast_path():
    rng = np.random.default_rng(1)
    d = rng.normal(size=8)
    B = rng.normal(size=(8, 8))
    assert np.allclose(commutator(d, B), commutator(np.diag(d), B))


def test_exp_skew_hermitian():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    H = A - A.conj().T
    assert np.allclose(exp_skew_hermitian(H), expm(H))
    with pytest.raises(ValueError):
        exp_skew_hermitian(A)


def test_phase_aligned_distance_ignores_global_phase():
    U = random_unitary(np.random.default_rng(5), 4)
    d, phi = phase_aligned_distance(U * np.exp(0.7j), U)
    assert d < 1e-10 and abs(np.exp(1j * phi) - np.exp(0.7j)) < 1e-8


def test_balance_function_validation():
    with pytest.raises(ValueError):
        BalanceFunction(np.array([[1.0, 0.0], [1.0, 1.0]]))
    W = BalanceFunction.random(3, 1, 2, 0)
    assert BalanceFunction.from_json(W.to_json(), 3).matrix.tolist() == W.matrix.tolist()
    assert W.ratio <= 2


def test_dense_cap():
    with pytest.raises(ValueError):
        embed_one(np.eye(2), 0, 15)
