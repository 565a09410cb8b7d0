"""Tabulate the periodized kernel K(z) and the normalization C(1,s) for a few orders."""

import argparse
import math

import numpy as np

from fracperiodic.frac_op import kernel_K_with_bound, normalization_C1s


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=float, nargs="+", default=[0.55, 0.75, 0.9])
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--tol", type=float, default=1e-12)
    args = ap.parse_args()
    z = np.linspace(0.05, 2 * math.pi - 0.05, args.points)
    for s in args.s:
        print(f"s={s}  C(1,s)={normalization_C1s(s)!r}")
        print(f"{'z':>10} {'K(z)':>22} {'|z|^-(1+2s)':>22} {'bound':>10}")
        for zk in z:
            k, _, bound, _ = kernel_K_with_bound(zk, s, args.tol)
            print(f"{zk:10.4f} {k:22.15g} {zk ** -(1 + 2 * s):22.15g} {bound:10.1e}")
        print()


if __name__ == "__main__":
    main()
