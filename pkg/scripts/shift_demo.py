"""Validate the twelve-step base shift and compile a small circuit on the chain."""

import argparse
import json

from globalgates.compiler.circuit import ShiftableChain, compile_circuit
from globalgates.compiler.shift import validate_schedule


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ell", type=int, default=0)
    ap.add_argument("--stride", type=int, default=8)
    args = ap.parse_args()
    for rec in validate_schedule(args.ell):
        print(f"step {rec.step:>2}: refs {rec.refs} flip {rec.flipped} "
              f"inner {rec.inner} outer {rec.outer} ok={rec.ok}")
    chain = ShiftableChain(3, stride=args.stride)
    circuit = [("h", (0,)), ("cz", (0, 1)), ("rx", (2,), 0.4), ("cz", (1, 2))]
    _, report = compile_circuit(chain, circuit, 0.1, expand=False)
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
