"""JSON-lines pulse files: one header line, then one pulse per line."""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..geometry import as_point
from ..quantum import BalanceFunction
from ..schemes import Scheme, scheme_from_json
from .pulses import Block, LocalSlot, OneQubitGlobal, PulseSequence, TwoQubitPhase
from .simulate import decode_matrix

FORMAT = "globalgates-pulses"
VERSION = 1
MAX_LINES = 2_000_000


class PulseFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def write_pulse_file(path, scheme: Scheme, W: BalanceFunction, seq: PulseSequence, extra: dict | None = None,
                     max_lines: int = MAX_LINES) -> int:
    if len(seq) > max_lines:
        raise PulseFileError(f"sequence has {len(seq)} pulses, above the file limit {max_lines}")
    header = {"format": FORMAT, "version": VERSION, "domain": [list(p) for p in scheme.domain.points],
              "scheme": scheme.to_json(), "W": W.to_json(), **seq.trace_json()}
    if extra:
        header["extra"] = extra
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for pulse in seq:
            fh.write(json.dumps(pulse.to_json(), sort_keys=True) + "\n")
    return len(seq)


def _pulse(d: dict):
    kind = d["kind"]
    if kind == "phase":
        key = d["key"]
        return TwoQubitPhase(tuple(key) if isinstance(key, list) else int(key), float(d["T"]), int(d.get("level", 0)))
    if kind == "global":
        re, im = d["z"]
        return OneQubitGlobal(complex(re, im), int(d.get("level", 0)))
    if kind == "local":
        return LocalSlot.make(as_point(d["site"]), decode_matrix(d["U"]), budget=float(d.get("budget", 0.0)),
                              refs=tuple(as_point(r) for r in d.get("refs", [])),
                              keys=tuple(tuple(k) if isinstance(k, list) else k for k in d.get("keys", [])),
                              label=d.get("label", ""), level=int(d.get("level", 0)))
    raise ValueError(f"unknown pulse kind {kind!r}")


@dataclass
class PulseFile:
    header: dict
    scheme: Scheme
    W: BalanceFunction
    sequence: PulseSequence


def read_pulse_file(path) -> PulseFile:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise PulseFileError("empty file", 1)
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise PulseFileError(f"bad header: {exc}", 1) from None
    if header.get("format") != FORMAT:
        raise PulseFileError("not a pulse file", 1)
    if header.get("version") != VERSION:
        raise PulseFileError(f"unsupported version {header.get('version')}", 1)
    try:
        scheme = scheme_from_json(header["scheme"])
        W = BalanceFunction.from_json(header.get("W"), scheme.domain.n)
    except (KeyError, TypeError, ValueError) as exc:
        raise PulseFileError(f"bad header: {exc}", 1) from None
    pulses = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            pulses.append(_pulse(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise PulseFileError(f"corrupted pulse: {exc}", i) from None
    seq = PulseSequence(Block(tuple(pulses)), header.get("target", []), header.get("epsilon", 0.0),
                        header.get("budget_trace", []), header.get("expected_length"),
                        header.get("length_upper_bound"), header.get("c"), header.get("certified", True))
    return PulseFile(header, scheme, W, seq)
