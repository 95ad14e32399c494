import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from globalgates.extraction import (
    AddressError,
    admissible_indices,
    extraction_plan,
    is_admissible_index,
    modified_balance,
    nested_scalar,
    source_amplitude,
    tilde_generator,
    verify_extraction_lemma,
    verify_extraction_proposition,
)
from globalgates.geometry import TranslationLattice
from globalgates.quantum import BalanceFunction
from globalgates.schemes import z14_scheme


def test_admissible_indices(chain):
    adm = admissible_indices(chain)
    assert len(adm) == 8
    assert all(is_admissible_index(chain, int(a)) for a in adm)
    assert not is_admissible_index(chain, 0)


def test_modified_balance_cases(chain):
    W = BalanceFunction.random(13, 1, 2, 7)
    m = chain.model
    # only the forward pair is in class (3,)
    assert modified_balance(m, chain.domain, (3,), W, 4, 1) == W.pair(4, 1)
    assert modified_balance(m, chain.domain, (3,), W, 1, 4) == W.pair(4, 1)
    assert modified_balance(m, chain.domain, (5,), W, 4, 1) == 0.0
    z = z14_scheme()
    Wz = BalanceFunction.random(14, 1, 2, 1)
    # offset 7 mod 14 is its own negative: both orders count
    assert modified_balance(z.model, z.domain, (7,), Wz, 0, 7) == Wz.pair(0, 7) + Wz.pair(7, 0)
    with pytest.raises(ValueError):
        modified_balance(m, chain.domain, (3,), W, 4, 4)


def test_plan_weights_constant_w(chain):
    plan = extraction_plan(chain, (0,), chain.R, BalanceFunction.constant(13))
    assert plan.keys == [(-1,), (-3,), (-9,)]
    assert plan.weights == [1.0, 1.0, 1.0]


@pytest.mark.parametrize("p", [0, 8])
@pytest.mark.parametrize("wseed", [None, 3])
def test_lemma_and_proposition_on_chain(chain, p, wseed):
    W = BalanceFunction.constant(13) if wseed is None else BalanceFunction.random(13, 1, 2, wseed)
    lem = verify_extraction_lemma(chain, p, chain.R, W)
    prop = verify_extraction_proposition(chain, p, chain.R, 0.6 + 0.8j, W)
    assert lem.ok and lem.max_deviation == 0.0 and lem.oracle_deviation < 1e-10
    assert prop.ok and prop.max_deviation < 1e-10


def test_unaddressed_point_refused_then_violates(chain):
    with pytest.raises(AddressError):
        verify_extraction_lemma(chain, 4, chain.R)
    lem = verify_extraction_lemma(chain, 4, chain.R, require_address=False)
    assert not lem.ok and not lem.addressed
    # spurious terms sit off the target site
    assert lem.violations and all(tuple(v["q"]) != (4,) for v in lem.violations)
    prop = verify_extraction_proposition(chain, 4, chain.R, 1.0, require_address=False)
    assert not prop.ok


def test_z14_proposition_random_w():
    z = z14_scheme()
    rep = verify_extraction_proposition(z, 0, z.R, 0.3 + 1j, BalanceFunction.random(14, 1, 2, 3))
    assert rep.ok


def test_printed_sign_is_off_for_odd_k():
    # the opposite sign convention differs from the verified generator by (-1)^k
    for k in range(5):
        z = 0.4 - 0.9j
        other = np.array([[0, (-1j) ** k * z], [-(1j**k) * np.conj(z), 0]])
        assert np.allclose(other, (-1) ** k * tilde_generator(z, k))


@given(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False), st.integers(0, 6))
def test_source_amplitude_inverts_tilde(z, k):
    X = tilde_generator(source_amplitude(z, k), k)
    assert np.allclose(X, [[0, z], [-np.conj(z), 0]])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**13 - 1))
def test_nested_scalar_zero_without_bit(a):
    from globalgates.builtins import chain_scheme

    s = chain_scheme()
    W = BalanceFunction.constant(13)
    keys = [(-1,), (-3,)]
    if not (a >> 0) & 1:
        assert nested_scalar(s.model, s.domain, keys, a, (0,), W) == 0.0
