"""Compile Rx(theta) on the five-site scheme with fixed budgets and simulate.

The certified budget needs far more than 10^6 repetitions per level, so this
sweeps explicit (uncertified) repetition counts and reports the measured
admissible-block error next to the exact pulse count.
"""

import argparse
import math

from globalgates.compiler import Budget, compile_local_unitary, rx, simulate_sequence
from globalgates.compiler.pulses import PulseContext
from globalgates.geometry import Domain, TranslationLattice
from globalgates.quantum import BalanceFunction
from globalgates.schemes import Scheme


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--theta", type=float, default=math.pi / 2)
    ap.add_argument("--W", choices=("constant", "random"), default="constant")
    ap.add_argument("--max-power", type=int, default=4, help="largest N per level is 4**max_power")
    args = ap.parse_args()
    s = Scheme(TranslationLattice(1), Domain.interval(0, 4), ((3,),), ((0,), (1,)))
    W = BalanceFunction.constant(5) if args.W == "constant" else BalanceFunction.random(5, 1, 2, 0)
    ctx = PulseContext(s.model, s.domain, W)
    print("N per level   pulses      distance   leakage")
    for j in range(1, args.max_power + 1):
        N = (4**j, 4**j)
        seq = compile_local_unitary(s, 3, s.R, rx(args.theta), 0.5, W=W, budget=Budget("fixed", N))
        rep = simulate_sequence(s, seq, ctx)
        print(f"{N[0]:>11}   {len(seq):>9}   {rep.distance:.5f}    {rep.leakage:.5f}")


if __name__ == "__main__":
    main()
