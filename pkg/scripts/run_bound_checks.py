#!/usr/bin/env python3
"""Run the full bound-check suite over a (j, M, R) grid and write one CSV.

Covers the positive-law moment bounds, their out-of-ball versions, the
interaction-strength and spatial-decay assumptions, the chained correlation
bound, and the two-point decay profile, all on the d=1 nearest-neighbor model.

Usage: python3 scripts/run_bound_checks.py [--z Z] [--out bound_checks.csv]
"""

import argparse
import sys

from loopgas.cluster import assumption3_check, assumption4_check, prop1_decay_check, prop3_check
from loopgas.loops import static_loop
from loopgas.model import ModelParams, Potential
from loopgas.pathint import Truncation, lemma1_check, lemma2_check, write_check_csv


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--z", type=float, default=0.02)
    ap.add_argument("--samples", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="bound_checks.csv")
    args = ap.parse_args()

    psi = Potential.empty("longitudinal")
    tr = Truncation(j_max=3, n_max=12, r_max=10, cluster_n_max=3,
                    samples=args.samples, seed=args.seed)
    rows = []
    for M in (0.25, 0.5, 1.0):
        pi = Potential({(1,): -M, (-1,): -M}, "transverse")
        params = ModelParams(d=1, beta=1.0, z=args.z, pi=pi, psi=psi, l=4.0)
        for j in (1, 2, 3):
            rows += lemma1_check(j, params, tr)
            for R in (0.0, 1.0, 2.0, 3.0):
                rows += lemma2_check(j, R, params, tr)

    pi = Potential({(1,): -0.5, (-1,): -0.5}, "transverse")
    params = ModelParams(d=1, beta=1.0, z=args.z, pi=pi, psi=psi, l=4.0)
    X = static_loop((0,), 1, 1.0)
    rows.append(assumption3_check(X, params, tr))
    rows += [assumption4_check(X, 0.0, r, params, tr) for r in (1.0, 2.0, 4.0)]
    rows.append(prop3_check(X, params, tr))
    rows += prop1_decay_check([1.0, 2.0, 4.0, 8.0], params, tr)

    with open(args.out, "w", newline="") as f:
        write_check_csv(rows, f)
    failed = [r for r in rows if not r.passed]
    print(f"{len(rows)} rows, {len(failed)} failed -> {args.out}")
    for r in failed:
        print(f"  FAIL {r.check} j={r.j} R={r.R}: lhs={complex(r.lhs).real:.5f} bound={r.bound:.5f}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
