"""Moving the three-point base ``{4l+1, 4l+3, 4l+9}`` along a chain by one period.

Twelve single-site flips take the base at ``l`` to the base at ``l + 1``.
Before a flip at ``r4`` the three points ``r1, r2, r3`` hold ones; each such
configuration is checked against the four-point hypotheses before the flip
is emitted.  The inverse move replays the schedule for ``l - 1`` backwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..geometry import Domain, TranslationLattice
from ..schemes import Homomorphism, PreconditionError, check_four_point, four_point_exhaustive
from .entangle import FLIP
from .pulses import LocalSlot, PulseSequence, concat

# (refs, flipped point, old bit) as offsets from 4l; steps 7-12 add 2
HALF_SCHEDULE = (
    ((1, 3, 9), 23, 0),
    ((3, 9, 23), 1, 1),
    ((3, 9, 23), 5, 0),
    ((3, 5, 23), 9, 1),
    ((3, 5, 23), 11, 0),
    ((3, 5, 11), 23, 1),
)
SCHEDULE = HALF_SCHEDULE + tuple((tuple(r + 2 for r in refs), x + 2, b) for refs, x, b in HALF_SCHEDULE)
BASE_OFFSETS = (1, 3, 9)
MAX_DISTANCE = 22

# reference distance multisets for steps 1-6: ({|ri - rj|}, {|r4 - ri|})
REFERENCE_DISTANCES = (
    ((2, 6, 8), (22, 20, 14)),
    ((6, 14, 20), (2, 8, 22)),
    ((6, 14, 20), (2, 4, 18)),
    ((2, 18, 20), (6, 4, 14)),
    ((2, 18, 20), (8, 6, 12)),
    ((2, 6, 8), (20, 18, 12)),
)


class WindowError(ValueError):
    pass


class ShiftValidationError(RuntimeError):
    def __init__(self, message: str, step: int, violated):
        super().__init__(message)
        self.step = step
        self.violated = list(violated)


def base_positions(ell: int) -> tuple[int, ...]:
    return tuple(4 * ell + r for r in BASE_OFFSETS)


def span(ell: int, schedule=SCHEDULE) -> tuple[int, int]:
    pts = [4 * ell + x for refs, x, _ in schedule for x in refs + (x,)]
    return min(pts), max(pts)


@dataclass
class StepRecord:
    step: int
    refs: tuple
    flipped: int
    old_bit: int
    inner: list
    outer: list
    ref_sum: int
    three_r4: int
    max_distance: int
    ok: bool
    violated: list = field(default_factory=list)

    def to_json(self) -> dict:
        return dict(self.__dict__)


def validate_step(ell: int, step: int, schedule=SCHEDULE, window: Domain | None = None) -> StepRecord:
    """Check one configuration; with ``window`` also certify the flip exhaustively there."""
    refs_off, x_off, bit = schedule[step]
    refs = tuple(4 * ell + r for r in refs_off)
    r4 = 4 * ell + x_off
    model = TranslationLattice(1)
    phi = Homomorphism.mod(4)
    try:
        rep = check_four_point(model, [(r,) for r in refs], (r4,), phi)
        violated, inner, outer = rep.violated, rep.distances[0], rep.distances[1]
    except PreconditionError as exc:
        violated, inner, outer = exc.violated, [], []
    pts = refs + (r4,)
    dmax = max(abs(a - b) for a in pts for b in pts)
    if dmax > MAX_DISTANCE:
        violated = list(violated) + [f"max distance {dmax} > {MAX_DISTANCE}"]
    if window is not None and not violated:
        cert = four_point_exhaustive(model, window, [(r,) for r in refs], (r4,), phi)
        if not cert.ok:
            violated = [f"exhaustive check: counterexample {cert.counterexample}"]
    return StepRecord(step + 1, refs, r4, bit, inner, outer, sum(refs), 3 * r4, dmax, not violated, list(violated))


def validate_schedule(ell: int, schedule=SCHEDULE, window: Domain | None = None) -> list[StepRecord]:
    return [validate_step(ell, i, schedule, window) for i in range(len(schedule))]


def classical_trace(ell: int, bits: dict, direction: int = 1, schedule=SCHEDULE) -> dict:
    """Apply the flips to a bit assignment, checking each flip's starting bit."""
    bits = dict(bits)
    start = ell if direction > 0 else ell - 1
    steps = list(enumerate(schedule))
    if direction < 0:
        steps = steps[::-1]
    for i, (_, x_off, old) in steps:
        x = 4 * start + x_off
        expect = old if direction > 0 else 1 - old
        if bits.get(x, 0) != expect:
            raise ShiftValidationError(f"step {i + 1}: bit at {x} is {bits.get(x, 0)}, expected {expect}",
                                       i + 1, ["bit precondition"])
        bits[x] = 1 - expect
    return bits


@dataclass
class ShiftState:
    ell: int
    lo: int
    hi: int
    log: list = field(default_factory=list)

    @property
    def base(self) -> tuple[int, ...]:
        return base_positions(self.ell)


def shift_base(state: ShiftState, direction: int = 1, flip_budget: float = 0.0,
               schedule=SCHEDULE) -> tuple[ShiftState, PulseSequence]:
    """Move the base one period; returns the new state and the twelve flip slots."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    start = state.ell if direction > 0 else state.ell - 1
    lo, hi = span(start, schedule)
    if lo < state.lo or hi > state.hi:
        raise WindowError(f"shift from l={state.ell} touches [{lo}, {hi}], outside [{state.lo}, {state.hi}]")
    records = validate_schedule(start, schedule)
    for rec in records:
        if not rec.ok:
            raise ShiftValidationError(f"step {rec.step} fails: {', '.join(rec.violated)}", rec.step, rec.violated)
    order = records if direction > 0 else records[::-1]
    slots = []
    for rec in order:
        U = FLIP if direction > 0 else FLIP.conj().T
        keys = tuple((rec.flipped - r,) for r in rec.refs)
        slots.append(LocalSlot.make((rec.flipped,), U, budget=flip_budget, refs=tuple((r,) for r in rec.refs),
                                    keys=keys, label=f"shift-step-{rec.step}"))
    seq = PulseSequence(concat(*slots), [], flip_budget * len(slots),
                        [{"gate": "shift-flip", "epsilon": flip_budget} for _ in slots], len(slots), len(slots))
    seq.target = [{"op": "local", "site": [s.site[0]], "U": [[[x.real, x.imag] for x in row] for row in s.U]}
                  for s in slots]
    new = ShiftState(state.ell + direction, state.lo, state.hi,
                     state.log + [{"from": state.ell, "direction": direction,
                                   "steps": [r.to_json() for r in order]}])
    return new, seq
