"""``ggc``: command-line front end.

Exit codes: 0 success, 1 certified negative result, 2 usage or resource error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import builtins as bi
from .extraction import AddressError, verify_extraction_lemma, verify_extraction_proposition
from .geometry import Domain, as_point
from .quantum import DENSE_CAP, BalanceFunction
from .schemes import Scheme, SchemeError, is_addressable, is_strictly_addressable, scheme_from_json

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    scheme: object = None  # builtin name or inline scheme description
    params: dict = field(default_factory=dict)
    W: dict | None = None
    epsilon: float | None = None
    seed: int = 0
    out: str | None = None
    fmt: str = "json"
    threads: int | None = None

    def to_json(self) -> dict:
        return asdict(self)


# --- config plumbing --------------------------------------------------------------


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return cfg


def _ints(text: str | None):
    if text is None:
        return None
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _resolve_scheme(spec, params: dict) -> Scheme:
    if spec is None:
        raise UsageError("no scheme given")
    if isinstance(spec, dict):
        if "window" not in spec:
            raise UsageError("scheme description needs a window")
        try:
            return scheme_from_json(spec)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad scheme description: {exc}") from None
    kw = {k: params[k] for k in ("m", "s", "seed", "size", "ell", "stride", "n_logical") if params.get(k) is not None}
    try:
        return bi.builtin_scheme(spec, **kw)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    except SchemeError as exc:
        raise UsageError(f"builtin {spec!r} could not be built: {exc}") from None


def _balance(spec, n: int, seed: int) -> BalanceFunction:
    if spec is None or spec == "constant":
        return BalanceFunction.constant(n)
    if spec == "random":
        return BalanceFunction.random(n, 1.0, 2.0, seed)
    if isinstance(spec, dict):
        try:
            return BalanceFunction.from_json(spec, n)
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad balance function: {exc}") from None
    raise UsageError(f"unknown balance specification {spec!r}")


def _emit(report: dict, out: str | None, fmt: str = "json", csv_text: str | None = None):
    if fmt == "csv" and csv_text is not None:
        text = csv_text
    else:
        text = json.dumps(report, indent=2, sort_keys=True, default=_jsonable) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, tuple):
        return list(x)
    return str(x)


def _merge(args, cfg: dict, key: str, default=None):
    val = getattr(args, key, None)
    if val is not None:
        return val
    return cfg.get(key, default)


# --- subcommands --------------------------------------------------------------------


def cmd_scheme_check(args, cfg) -> tuple[int, dict]:
    params = {k: _merge(args, cfg, k) for k in ("m", "s", "seed", "size", "ell", "stride")}
    scheme = _resolve_scheme(_merge(args, cfg, "scheme"), params)
    refs = _ints(args.refs) if args.refs else cfg.get("refs")
    if refs:
        scheme = Scheme(scheme.model, scheme.domain, scheme.P,
                        tuple(as_point(r) if not isinstance(r, int) else (r,) + (0,) * (scheme.domain.dim - 1)
                              for r in refs))
    t0 = time.perf_counter()
    cert = is_strictly_addressable(scheme)
    wall = time.perf_counter() - t0
    report = {"certificate": cert.to_json(), "workspace": len(scheme.P), "window": scheme.domain.n,
              "density": scheme.density(), "base": [list(r) for r in scheme.R],
              "timing": {"check_seconds": wall}}
    return (EXIT_OK if cert.ok else EXIT_NEGATIVE), report


def cmd_verify_extraction(args, cfg) -> tuple[int, dict]:
    params = {k: _merge(args, cfg, k) for k in ("m", "s", "seed", "size", "ell", "stride")}
    spec = _merge(args, cfg, "scheme", "chain")
    window = _ints(args.window) if args.window else cfg.get("window")
    if window and not isinstance(spec, dict):
        base = _resolve_scheme(spec, params)
        D = Domain.interval(window[0], window[1])
        scheme = Scheme(base.model, D, tuple(p for p in base.P if p in D), tuple(r for r in base.R if r in D))
    else:
        scheme = _resolve_scheme(spec, params)
    if scheme.domain.n > DENSE_CAP:
        raise UsageError(f"explicit verification is capped at {DENSE_CAP} qubits, the window has {scheme.domain.n}")
    W = _balance(_merge(args, cfg, "W"), scheme.domain.n, args.seed)
    points = [as_point(p) for p in (_ints(args.p) or cfg.get("points") or [])] or list(scheme.P)
    refs = scheme.R
    results, ok = [], True
    t0 = time.perf_counter()
    for p in points:
        try:
            lem = verify_extraction_lemma(scheme, p, refs, W, require_address=not args.unchecked)
            prop = verify_extraction_proposition(scheme, p, refs, complex(args.z), W,
                                                 require_address=not args.unchecked)
            results.append({"p": list(p), "lemma": lem.to_json(), "proposition": prop.to_json()})
            ok &= lem.ok and prop.ok
        except AddressError as exc:
            results.append({"p": list(p), "refused": str(exc)})
            ok = False
    report = {"results": results, "pass": ok, "W": W.to_json(), "timing": {"seconds": time.perf_counter() - t0}}
    return (EXIT_OK if ok else EXIT_NEGATIVE), report


def _budget(args, cfg):
    from .compiler.local import Budget

    mode = _merge(args, cfg, "budget", "apriori")
    Ns = _ints(args.N) if args.N else cfg.get("N", ())
    try:
        return Budget(mode, tuple(Ns or ()), float(_merge(args, cfg, "c", 2.0)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_compile(args, cfg) -> tuple[int, dict]:
    from .compiler.circuit import CircuitError, ShiftableChain, compile_circuit
    from .compiler.local import BudgetUnderflow
    from .compiler.pulsefile import PulseFileError, write_pulse_file

    eps = _merge(args, cfg, "epsilon")
    if eps is None or not (0 < float(eps) < 1):
        raise UsageError(f"epsilon must lie in (0, 1), got {eps}")
    eps = float(eps)
    budget = _budget(args, cfg)
    circuit = cfg.get("circuit")
    if args.circuit:
        try:
            circuit = json.loads(args.circuit)
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad circuit: {exc}") from None
    spec = _merge(args, cfg, "scheme", "chain")
    params = {k: _merge(args, cfg, k) for k in ("m", "s", "seed", "size", "ell", "stride", "n_logical")}
    if circuit is None:
        gate = _merge(args, cfg, "gate", "rx")
        theta = float(_merge(args, cfg, "theta", math.pi / 2))
        p = as_point(_ints(args.p) or cfg.get("p") or [4])
    if spec == "shiftable-chain":
        target = ShiftableChain(int(params.get("n_logical") or 3), int(params.get("stride") or 8),
                                int(params.get("ell") or 0))
        scheme = target.scheme(target.ell)
        if circuit is None:
            circuit = [{"name": gate, "qubits": [0], "params": [theta]}]
    else:
        scheme = target = _resolve_scheme(spec, params)
        if circuit is None:
            if p not in scheme.P:
                raise UsageError(f"{p} is not a workspace point")
            circuit = [{"name": gate, "qubits": [scheme.P.index(p)], "params": [theta]}]
    W = _balance(_merge(args, cfg, "W"), scheme.domain.n, args.seed)
    try:
        seq, rep = compile_circuit(target, circuit, eps, W=W, budget=budget, expand=not args.slots)
    except BudgetUnderflow as exc:
        return EXIT_USAGE, {"error": "budget underflow", "message": str(exc), "level": exc.level,
                            "required_N": exc.required, "trace": exc.trace}
    except AddressError as exc:
        return EXIT_NEGATIVE, {"error": "not addressable", "message": str(exc)}
    except (CircuitError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    report = {"compile": rep, "trace": seq.trace_json()}
    if spec == "shiftable-chain":
        report["distance_bound_holds"] = rep["max_offset"] <= 22
    if args.pulses:
        try:
            report["pulse_file"] = {"path": args.pulses, "lines": write_pulse_file(args.pulses, scheme, W, seq)}
        except PulseFileError as exc:
            raise UsageError(str(exc)) from None
    return EXIT_OK, report


def cmd_simulate(args, cfg) -> tuple[int, dict]:
    from .compiler.pulses import PulseContext
    from .compiler.pulsefile import PulseFileError, read_pulse_file
    from .compiler.simulate import simulate_sequence

    path = args.pulse_file or cfg.get("pulse_file")
    if not path:
        raise UsageError("no pulse file given")
    try:
        pf = read_pulse_file(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except PulseFileError as exc:
        raise UsageError(str(exc)) from None
    if pf.scheme.domain.n > 24:
        raise UsageError(f"simulation is capped at 24 qubits, the window has {pf.scheme.domain.n}")
    ctx = PulseContext(pf.scheme.model, pf.scheme.domain, pf.W)
    rep = simulate_sequence(pf.scheme, pf.sequence, ctx, args.threads)
    eps = pf.sequence.epsilon
    within = rep.distance <= eps if pf.sequence.target else rep.distance <= 1e-12
    out = rep.to_json()
    timing = {"wall_time": out.pop("wall_time")}
    report = {"simulation": out, "declared_epsilon": eps, "within_epsilon": bool(within), "timing": timing}
    return (EXIT_OK if within else EXIT_NEGATIVE), report


def cmd_shift_validate(args, cfg) -> tuple[int, dict]:
    from .compiler import shift

    rng = _ints(args.ell_range) or cfg.get("ell_range") or [-3, 3]
    if len(rng) != 2 or rng[0] > rng[1]:
        raise UsageError("ell range must be lo,hi")
    schedule = shift.SCHEDULE
    if args.steps or cfg.get("steps"):
        try:
            raw = cfg.get("steps") if not args.steps else json.load(open(args.steps))
            schedule = tuple((tuple(s["refs"]), int(s["flip"]), int(s["old_bit"])) for s in raw)
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise UsageError(f"bad step table: {exc}") from None
        if len(schedule) != 12:
            raise UsageError("step table needs twelve steps")
    window = _ints(args.window) or cfg.get("window")
    steps, ok = [], True
    for ell in range(rng[0], rng[1] + 1):
        lo, hi = shift.span(ell, schedule)
        if window and (lo < window[0] or hi > window[1]):
            raise UsageError(f"window {window} does not cover [{lo}, {hi}] needed at l={ell}")
        dom = Domain.interval(*(window or (lo - 32, hi + 32)))
        recs = shift.validate_schedule(ell, schedule, dom)
        for i, rec in enumerate(recs):
            ref = shift.REFERENCE_DISTANCES[i % 6]
            match = sorted(rec.inner) == sorted(ref[0]) and sorted(rec.outer) == sorted(ref[1])
            row = rec.to_json() | {"ell": ell, "matches_reference": match}
            ok &= rec.ok and match
            steps.append(row)
        bits = {x: 1 for x in shift.base_positions(ell)} | {4 * j: 1 for j in range(ell - 2, ell + 8)}
        try:
            after = shift.classical_trace(ell, bits, 1, schedule)
            changed = sorted(x for x in set(after) | set(bits) if after.get(x, 0) != bits.get(x, 0))
            expected = sorted(set(shift.base_positions(ell)) ^ set(shift.base_positions(ell + 1)))
            trace_ok = changed == expected and all(after.get(x, 0) == 1 for x in shift.base_positions(ell + 1))
        except shift.ShiftValidationError as exc:
            trace_ok, changed = False, str(exc)
        ok &= trace_ok
        steps.append({"ell": ell, "classical_trace_ok": trace_ok, "changed": changed})
    max_d = max(s["max_distance"] for s in steps if "max_distance" in s)
    report = {"steps": steps, "max_distance": max_d, "pass": ok and max_d == shift.MAX_DISTANCE}
    return (EXIT_OK if report["pass"] else EXIT_NEGATIVE), report


def cmd_euclid_search(args, cfg) -> tuple[int, dict]:
    size = int(_merge(args, cfg, "size", 24))
    trials = int(_merge(args, cfg, "trials", 200))
    t0 = time.perf_counter()
    res = bi.euclid_s2(size, args.seed, trials)
    wall = time.perf_counter() - t0
    if not res.found:
        return EXIT_NEGATIVE, {"found": False, "trials": trials, "timing": {"seconds": wall}}
    r1 = res.scheme.R[0]
    mods = {str(list(p)): sum((a - b) ** 2 for a, b in zip(p, r1)) % 16 for p in res.scheme.P}
    congruence = all(v == 1 for v in mods.values())
    report = {"found": True, "scheme": res.scheme.to_json() | {"window": {"size": size}},
              "certificate": res.certificate.to_json(), "workspace": len(res.scheme.P),
              "candidates_certified": res.candidates_certified, "candidates_rejected": res.candidates_rejected,
              "mod16_residues": mods, "mod16_congruence": congruence, "timing": {"seconds": wall}}
    ok = res.certificate.ok and congruence
    return (EXIT_OK if ok else EXIT_NEGATIVE), report


def cmd_commutator_sweep(args, cfg) -> tuple[int, dict]:
    from .compiler.commutator import commutator_sweep

    Ns = _ints(args.Ns) or cfg.get("Ns") or [4**j for j in range(2, 9)]
    res = commutator_sweep(tuple(Ns), int(_merge(args, cfg, "instances", 6)), seed=args.seed)
    report = res.to_json()
    report["slope_in_range"] = -0.6 <= res.slope <= -0.4
    args._csv = res.to_csv()
    return (EXIT_OK if report["slope_in_range"] else EXIT_NEGATIVE), report


COMMANDS = {
    "scheme-check": cmd_scheme_check,
    "verify-extraction": cmd_verify_extraction,
    "compile": cmd_compile,
    "simulate": cmd_simulate,
    "shift-validate": cmd_shift_validate,
    "euclid-search": cmd_euclid_search,
    "commutator-sweep": cmd_commutator_sweep,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int)
    parser = _Parser(prog="ggc", description="Global-gate scheme certification and compilation.")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    def scheme_args(p, default=None):
        p.add_argument("scheme", nargs="?", default=default, help=f"builtin: {', '.join(bi.BUILTINS)}")
        p.add_argument("--m", type=int)
        p.add_argument("--s", type=int)
        p.add_argument("--size", type=int)
        p.add_argument("--ell", type=int)
        p.add_argument("--stride", type=int)

    p = sub.add_parser("scheme-check", parents=[common])
    scheme_args(p)
    p.add_argument("--refs", help="replace the base, e.g. 1,3")

    p = sub.add_parser("verify-extraction", parents=[common])
    scheme_args(p)
    p.add_argument("--p", help="workspace point (default: all)")
    p.add_argument("--W", choices=("constant", "random"))
    p.add_argument("--z", type=complex, default=complex(0.6, 0.8))
    p.add_argument("--window", help="restrict to lo,hi")
    p.add_argument("--unchecked", action="store_true", help="verify even if the references fail to address p")

    p = sub.add_parser("compile", parents=[common])
    scheme_args(p)
    p.add_argument("--n-logical", dest="n_logical", type=int)
    p.add_argument("--p")
    p.add_argument("--gate")
    p.add_argument("--theta", type=float)
    p.add_argument("--circuit", help="JSON list of gates")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--W", choices=("constant", "random"))
    p.add_argument("--budget", choices=("apriori", "fixed"))
    p.add_argument("--N", help="fixed repetition counts per level")
    p.add_argument("--c", type=float)
    p.add_argument("--slots", action="store_true", help="emit compiled gates as budgeted slots")
    p.add_argument("--pulses", help="write a pulse file here")

    p = sub.add_parser("simulate", parents=[common])
    p.add_argument("pulse_file", nargs="?")

    p = sub.add_parser("shift-validate", parents=[common])
    p.add_argument("--ell-range", dest="ell_range")
    p.add_argument("--steps", help="JSON step table to validate instead of the built-in one")
    p.add_argument("--window")

    p = sub.add_parser("euclid-search", parents=[common])
    p.add_argument("--size", type=int)
    p.add_argument("--trials", type=int)

    p = sub.add_parser("commutator-sweep", parents=[common])
    p.add_argument("--Ns")
    p.add_argument("--instances", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.subcommand:
            raise UsageError("missing subcommand; see --help")
        if args.threads is None and os.environ.get("GGC_THREADS"):
            args.threads = int(os.environ["GGC_THREADS"])
        cfg = _load_config(args.config)
        code, report = COMMANDS[args.subcommand](args, cfg)
        config = RunConfig(args.subcommand, getattr(args, "scheme", None) or cfg.get("scheme"),
                           {k: v for k, v in vars(args).items()
                            if k not in ("subcommand", "config", "out", "fmt", "threads", "seed") and not k.startswith("_")},
                           cfg.get("W"), getattr(args, "epsilon", None) or cfg.get("epsilon"), args.seed,
                           args.out, args.fmt, args.threads)
        report = {"config": config.to_json(), "exit_code": code, **report}
        _emit(report, args.out, args.fmt, getattr(args, "_csv", None))
        return code
    except UsageError as exc:
        sys.stderr.write(f"ggc: error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, KeyError, TypeError, LookupError, MemoryError) as exc:
        sys.stderr.write(f"ggc: error: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
