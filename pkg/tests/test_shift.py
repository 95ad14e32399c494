import pytest
from hypothesis import given, strategies as st

from globalgates.compiler.shift import (
    REFERENCE_DISTANCES,
    SCHEDULE,
    ShiftState,
    ShiftValidationError,
    WindowError,
    base_positions,
    classical_trace,
    shift_base,
    span,
    validate_schedule,
    validate_step,
)
from globalgates.geometry import Domain


@pytest.mark.parametrize("ell", range(-3, 4))
def test_schedule_validates(ell):
    recs = validate_schedule(ell)
    assert len(recs) == 12 and all(r.ok for r in recs)
    for rec, (inner, outer) in zip(recs[:6], REFERENCE_DISTANCES):
        assert rec.inner == sorted(inner) and sorted(rec.outer) == sorted(outer)
    assert max(r.max_distance for r in recs) <= 22


def test_first_step_exhaustive_on_window():
    rec = validate_step(0, 0, window=Domain.interval(-24, 48))
    assert rec.ok and rec.ref_sum == 13 and rec.three_r4 == 69


def test_span():
    assert span(0) == (1, 25)
    assert span(2) == (9, 33)


@given(st.integers(-10, 10))
def test_classical_trace_round_trip(ell):
    start = {x: 1 for x in base_positions(ell)}
    moved = classical_trace(ell, start)
    assert {x for x, b in moved.items() if b} == set(base_positions(ell + 1))
    back = classical_trace(ell + 1, moved, direction=-1)
    assert {x for x, b in back.items() if b} == set(base_positions(ell))


def test_classical_trace_rejects_wrong_bits():
    with pytest.raises(ShiftValidationError):
        classical_trace(0, {})


def test_shift_emits_twelve_flips():
    state = ShiftState(0, -8, 40)
    new, seq = shift_base(state, 1, flip_budget=0.01)
    assert new.ell == 1 and len(seq) == 12
    assert seq.allotted_error() == pytest.approx(0.12)
    first = next(iter(seq.root))
    assert first.site == (23,) and first.keys == ((22,), (20,), (14,))
    back, seq2 = shift_base(new, -1)
    assert back.ell == 0 and next(iter(seq2.root)).label == "shift-step-12"


def test_shift_outside_window():
    with pytest.raises(WindowError):
        shift_base(ShiftState(0, 0, 20), 1)
    with pytest.raises(ValueError):
        shift_base(ShiftState(0, -8, 40), 2)


def test_broken_schedule_rejected():
    bad = ((((1, 3, 5), 23, 0),) + SCHEDULE[1:])
    with pytest.raises(ShiftValidationError) as exc:
        shift_base(ShiftState(0, -8, 40), 1, schedule=bad)
    assert exc.value.step == 1
