import itertools

import pytest
from hypothesis import given, settings, strategies as st

from globalgates.builtins import chain_scheme, column_scheme, lifted_z14, stride_scheme
from globalgates.geometry import Domain, EuclideanIsometry, TranslationLattice
from globalgates.schemes import (
    Homomorphism,
    LiftRefused,
    PreconditionError,
    Scheme,
    SchemeError,
    build_z4_scheme,
    check_condition5,
    check_four_point,
    euclid_scaffold_ok,
    is_addressable,
    is_strictly_addressable,
    lift_scheme,
    naive_addressable,
    prune_to_strict,
    replay,
    scheme_from_json,
    z14_scheme,
    z139_scheme,
)


def test_z14_strict_with_condition5():
    cert = is_strictly_addressable(z14_scheme())
    assert cert.kind == "strict" and cert.condition5
    assert replay(z14_scheme(), cert)


def test_two_point_base_fails_on_z14():
    s = z14_scheme()
    s2 = Scheme(s.model, s.domain, s.P, ((1,), (3,)))
    cert = is_strictly_addressable(s2)
    assert cert.kind == "failure"
    assert cert.counterexample == ((4,), (3,), (1,))
    assert replay(s2, cert)


def test_single_reference_never_addresses():
    # p' = r_1 with r' = p always matches the lone class
    s = z14_scheme()
    for r in s.R:
        cert = is_addressable(s, (0,), (r,))
        assert not cert.ok and cert.counterexample[0] == r


def test_chain_p4_counterexample_frozen(chain):
    cert = is_addressable(chain, (4,), chain.R)
    assert not cert.ok
    assert cert.counterexample == ((3,), (0,), (4,), (8,))
    assert is_addressable(chain, (0,), chain.R, strict=True).ok
    assert is_addressable(chain, (8,), chain.R, strict=True).ok


def test_chain_p4_no_smaller_reference_set(chain):
    for k in (1, 2):
        for refs in itertools.combinations(chain.R, k):
            assert not is_addressable(chain, (4,), refs).ok


def test_z4_family_counterexample_frozen():
    cert = is_strictly_addressable(z139_scheme(8))
    assert cert.kind == "failure"
    assert cert.p == (-24,) and cert.counterexample == ((-5,), (20,), (-32,), (28,))
    s = z139_scheme(8)
    assert naive_addressable(s, (-24,), s.R) is not None


def test_stride8_repair_certifies():
    for m in (4, 8, 16):
        cert = is_strictly_addressable(stride_scheme(8, m))
        assert cert.ok and cert.condition5


def test_offset_stride8_certifies():
    w = Domain.interval(-64, 64)
    s = Scheme(TranslationLattice(1), w, tuple(x for x in w if x[0] % 8 == 4), ((1,), (3,), (9,)))
    assert is_strictly_addressable(s).ok


def test_lift_z14():
    s = lifted_z14(64)
    assert len(s.P) == 9 and s.domain.n == 129
    assert is_strictly_addressable(s).ok


def test_lift_refuses_non_strict_base():
    with pytest.raises(LiftRefused):
        lift_scheme(Homomorphism.project(2), z139_scheme(4), [(1, 0), (3, 0), (9, 0)], TranslationLattice(2),
                    Domain.box((-8, -2), (8, 2)))


def test_lift_refuses_equal_doubles():
    base = Scheme(TranslationLattice(1, (2,)), Domain.interval(0, 1), ((0,),), ((1,),))
    with pytest.raises(LiftRefused):
        lift_scheme(Homomorphism.mod(2), base, [(1,)], TranslationLattice(1), Domain.interval(-4, 4))


def test_column_scheme_stride8_certifies():
    assert is_strictly_addressable(column_scheme(2, 8, (1, 3, 9), 16, 4)).ok


def test_z4m_preconditions():
    for m, ok in ((3, False), (4, False), (5, True)):
        model = TranslationLattice(1, (4 * m,))
        window = Domain.interval(0, 4 * m - 1)
        if ok:
            s = build_z4_scheme(model, window, Homomorphism.mod(4), [1, 3, 9])
            assert not is_strictly_addressable(s).ok
        else:
            with pytest.raises(PreconditionError) as exc:
                build_z4_scheme(model, window, Homomorphism.mod(4), [1, 3, 9])
            assert "distinct differences r_i - r_j" in exc.value.violated


def test_z4_precondition_residues():
    with pytest.raises(PreconditionError) as exc:
        build_z4_scheme(TranslationLattice(1), Domain.interval(-8, 8), Homomorphism.mod(4), [1, 5, 9])
    assert "phi(R) = {1, 3}" in exc.value.violated


def test_four_point_reports_violation():
    rep = check_four_point(TranslationLattice(1), [(1,), (3,), (9,)], (5,), Homomorphism.mod(4))
    assert not rep.ok and "distinct differences r_i - r_j" in rep.violated
    rep = check_four_point(TranslationLattice(1), [(1,), (3,), (9,)], (23,), Homomorphism.mod(4))
    assert rep.ok and rep.distances == ([2, 6, 8], [22, 20, 14])


def test_condition5_witness():
    s = Scheme(TranslationLattice(1), Domain.interval(0, 6), ((0,), (2,)), ((4,),))
    holds, witness = check_condition5(s)
    assert not holds and witness == ((0,), (2,), (2,), (4,))


def test_scheme_validation():
    D = Domain.interval(0, 4)
    with pytest.raises(SchemeError):
        Scheme(TranslationLattice(1), D, ((1,),), ((1,),))
    with pytest.raises(SchemeError):
        Scheme(TranslationLattice(1), D, ((9,),), ((1,),))


def test_scheme_json_residue_workspace():
    s = scheme_from_json({"model": {"kind": "translation", "dim": 1}, "window": {"lo": [-8], "hi": [8]},
                          "P": {"modulus": [4], "exclude": [[0]]}, "R": [[1], [3], [5]]})
    assert (0,) not in s.P and (4,) in s.P and len(s.P) == 4


def test_admits():
    s = chain_scheme()
    bits = {(1,): 1, (3,): 1, (9,): 1, (4,): 1}
    assert s.admits(bits)
    assert not s.admits(bits | {(2,): 1})
    assert not s.admits({(1,): 1, (3,): 1})


def test_euclid_scaffold():
    assert euclid_scaffold_ok([(1, 0), (5, 0), (-3, 4)])
    assert not euclid_scaffold_ok([(1, 0), (1, 8), (5, 0)])


def test_prune_is_certified():
    s = prune_to_strict(z139_scheme(4))
    assert is_strictly_addressable(s).ok


schemes_1d = st.integers(5, 11).flatmap(lambda n: st.tuples(
    st.just(n), st.sets(st.integers(0, n - 1), min_size=3, max_size=n), st.booleans()))


@settings(max_examples=60, deadline=None)
@given(schemes_1d, st.data())
def test_fast_checker_matches_naive_oracle(spec, data):
    n, pts, cyclic = spec
    pts = sorted(pts)
    k = data.draw(st.integers(1, min(3, len(pts) - 1)))
    R = tuple((x,) for x in pts[:k])
    P = tuple((x,) for x in pts[k:])
    model = TranslationLattice(1, (n,) if cyclic else None)
    s = Scheme(model, Domain.interval(0, n - 1), P, R)
    for strict in (False, True):
        for p in P:
            fast = is_addressable(s, p, R, strict)
            assert fast.ok == (naive_addressable(s, p, R, strict) is None)
            assert replay(s, fast)


@settings(max_examples=25, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=3, max_size=8))
def test_fast_checker_matches_naive_euclidean(pts):
    pts = sorted(pts)
    s = Scheme(EuclideanIsometry(2), Domain.box((0, 0), (5, 5)), tuple(pts[2:]), tuple(pts[:2]))
    for p in s.P:
        assert is_addressable(s, p, s.R).ok == (naive_addressable(s, p, s.R) is None)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.sets(st.integers(-16, 16), max_size=10))
def test_pruning_workspace_preserves_certificate(m, drop):
    # removing workspace points keeps a strict scheme strict
    s = stride_scheme(8, m)
    keep = tuple(p for p in s.P if p[0] not in drop) or s.P[:1]
    assert is_strictly_addressable(Scheme(s.model, s.domain, keep, s.R)).ok
