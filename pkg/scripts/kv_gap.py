"""Operator norm of the Kaijser-Varopoulos quadratic vs its torus sup norm.

The 6x6 commuting contractive triple pushes |p(rT)| above the sup norm of
p on the 3-torus for every r close to 1, which is what rules out a
contractive H-infinity representation.  Both sides use independent
oracles: dense SVD against a grid maximum.
"""
import argparse

import numpy as np

from aglerlab.opmodel import eval_polynomial, kv_polynomial, kv_tuple


def torus_sup(grid: int) -> float:
    theta = 2 * np.pi * np.arange(grid) / grid
    z = np.exp(1j * theta)
    z1, z2, z3 = np.meshgrid(z, z, z, indexing="ij")
    vals = (z1 ** 2 + z2 ** 2 + z3 ** 2
            - 2 * z1 * z2 - 2 * z2 * z3 - 2 * z3 * z1)
    return float(np.abs(vals).max())


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", type=int, default=60, help="points per torus axis")
    args = parser.parse_args()

    p = kv_polynomial()
    T = kv_tuple()
    sup = torus_sup(args.grid)
    print(f"sup |p| on the {args.grid}^3 torus grid: {sup:.6f}")
    print(f"analytic reference 3*sqrt(3) = {3 * np.sqrt(3):.6f} for |p(T)|")
    print(f"{'r':>8} {'|p(rT)|':>12} {'margin over sup':>16}")
    for r in (0.9, 0.99, 0.999, 0.9999):
        val = float(np.linalg.norm(eval_polynomial(p, T.scaled(r)), 2))
        print(f"{r:8.4f} {val:12.6f} {100 * (val / sup - 1):15.2f}%")


if __name__ == "__main__":
    main()
