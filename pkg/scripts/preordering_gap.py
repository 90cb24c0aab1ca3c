"""Finite-sample norm gap between the ample and nearly ample preorderings.

Globally the two preorderings generate the same algebra norm; on a finite
sample the nearly ample cone sees strictly more admissible kernels, so its
bisection norm sits above the single-kernel Szego value.  This experiment
measures that gap on random transfer-function samples (the reason the
interval-overlap acceptance criterion cannot close below ~1e-2 at 4-point
scale; see the decisions ledger).
"""
import argparse

import numpy as np

from aglerlab.preorder import standard_ample, standard_nearly_ample
from aglerlab.realize import SolverParams, ample_membership, schur_agler_norm
from aglerlab.sampling import random_transfer_sample


def ample_norm(phi, pre, lo, hi=2.0):
    while not ample_membership(phi, pre, hi)[0]:
        hi *= 2
    for _ in range(50):
        mid = (lo + hi) / 2
        if ample_membership(phi, pre, mid)[0]:
            hi = mid
        else:
            lo = mid
    return hi


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=5)
    parser.add_argument("--points", type=int, default=4)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    pre_a = standard_ample(3)
    pre_na = standard_nearly_ample(3, 0, 1)
    params = SolverParams(max_iter=30_000, stall_rtol=1e-9)

    print(f"{'trial':>5} {'sup|phi|':>10} {'ample c*':>10} "
          f"{'NA interval':>24} {'gap':>10}")
    for trial in range(args.trials):
        phi, _ = random_transfer_sample(rng, args.points, 3)
        c_a = ample_norm(phi, pre_a, phi.sup_norm())
        out = schur_agler_norm(phi, pre_na, tol=2e-4, params=params)
        gap = max(out.c_lo - c_a, 0.0)
        tag = "" if out.resolved else " (unresolved probes)"
        print(f"{trial:5d} {phi.sup_norm():10.6f} {c_a:10.6f} "
              f"[{out.c_lo:10.6f},{out.c_hi:10.6f}] {gap:10.3e}{tag}")


if __name__ == "__main__":
    main()
