import json

import pytest

from globalgates.cli import main
from globalgates.compiler.pulsefile import PulseFileError, read_pulse_file

FIVE = {"model": {"kind": "translation", "dim": 1}, "window": {"lo": [0], "hi": [4]},
        "P": [[3]], "R": [[0], [1]]}


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def test_scheme_check_exit_codes(capsys):
    code, rep = run(["scheme-check", "z14"], capsys)
    assert code == 0
    code, _ = run(["scheme-check", "z14", "--refs", "1,3"], capsys)
    assert code == 1
    assert run(["scheme-check", "nonsense"], capsys)[0] == 2
    assert main([]) == 2


def test_verify_extraction_resource_guard(capsys):
    assert run(["verify-extraction", "z-139", "--m", "4"], capsys)[0] == 2


def test_compile_then_simulate(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"scheme": FIVE, "p": [3], "gate": "rx", "theta": 1.5707963267948966}))
    pulses = tmp_path / "p.jsonl"
    code, rep = run(["compile", "--config", str(cfg), "--epsilon", "0.5", "--budget", "fixed",
                     "--N", "64,64", "--pulses", str(pulses)], capsys)
    assert code == 0 and rep["pulse_file"]["lines"] == rep["compile"]["length"]
    code, sim = run(["simulate", str(pulses)], capsys)
    assert code == 0 and sim["within_epsilon"]
    # corrupt one pulse line
    lines = pulses.read_text().splitlines()
    lines[5] = "{not json"
    pulses.write_text("\n".join(lines) + "\n")
    with pytest.raises(PulseFileError) as exc:
        read_pulse_file(pulses)
    assert exc.value.line == 6
    assert run(["simulate", str(pulses)], capsys)[0] == 2


def test_compile_errors(tmp_path, capsys):
    assert run(["compile", "chain", "--epsilon", "0"], capsys)[0] == 2
    # p = 4 on the chain is refused as non-addressable
    assert run(["compile", "chain", "--p", "4", "--epsilon", "0.3"], capsys)[0] == 1
    # p = 8 is addressable but the certified budget underflows
    code, rep = run(["compile", "chain", "--p", "8", "--epsilon", "0.3"], capsys)
    assert code == 2 and rep["error"] == "budget underflow"


def test_empty_pulse_file_is_identity(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"scheme": FIVE, "p": [3], "gate": "rx", "theta": 0.0}))
    pulses = tmp_path / "p.jsonl"
    assert run(["compile", "--config", str(cfg), "--epsilon", "0.1", "--pulses", str(pulses)], capsys)[0] == 0
    code, sim = run(["simulate", str(pulses)], capsys)
    assert code == 0 and sim["simulation"]["distance"] < 1e-12


def test_shiftable_compile_reports_bound(capsys):
    code, rep = run(["compile", "shiftable-chain", "--circuit", '[["h",[0]],["cz",[0,1]]]',
                     "--epsilon", "0.2", "--slots"], capsys)
    assert code == 0 and rep["distance_bound_holds"]


def test_shift_validate(tmp_path, capsys):
    from globalgates.compiler.shift import SCHEDULE

    code, rep = run(["shift-validate", "--ell-range=-3,3"], capsys)
    assert code == 0 and rep["max_distance"] == 22
    table = [{"refs": list(r), "flip": x, "old_bit": b} for r, x, b in SCHEDULE]
    table[0]["refs"] = [1, 3, 5]
    bad = tmp_path / "steps.json"
    bad.write_text(json.dumps(table))
    code, rep = run(["shift-validate", "--steps", str(bad)], capsys)
    assert code == 1
    assert "distinct differences r_i - r_j" in rep["steps"][0]["violated"]
    assert run(["shift-validate", "--window", "0,10"], capsys)[0] == 2


def test_sweep_csv_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["commutator-sweep", "--Ns", "16,64", "--instances", "2", "--format", "csv",
                     "--out", str(path)]) == 0
    assert a.read_text() == b.read_text()
    assert a.read_text().startswith("instance,qubits,N,M,error")
