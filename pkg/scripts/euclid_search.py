"""Search a square window of Z^2 for a strict scheme under Euclidean isometries."""

import argparse
import time

from globalgates.builtins import euclid_s2
from globalgates.schemes import is_strictly_addressable


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=24)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=200)
    args = ap.parse_args()
    t0 = time.perf_counter()
    res = euclid_s2(args.size, args.seed, args.trials)
    print(f"{res.trials} trials, {res.candidates_rejected} rejected, {res.candidates_certified} certified "
          f"in {time.perf_counter() - t0:.1f}s")
    if not res.found:
        print("no scheme found")
        return
    s = res.scheme
    cert = is_strictly_addressable(s)
    r1 = s.R[0]
    residues = sorted({sum((a - b) ** 2 for a, b in zip(p, r1)) % 16 for p in s.P})
    print(f"R = {s.R}")
    print(f"|P| = {len(s.P)} of {s.domain.n} sites; strict {cert.ok}; condition (5) {cert.condition5}")
    print(f"|p - r1|^2 mod 16 over P: {residues}")


if __name__ == "__main__":
    main()
