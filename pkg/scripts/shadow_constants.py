"""Compare the grid shadow measure of Stolz domains with the closed-form arc length."""

import argparse

import numpy as np

from hardyop import kernels as kn


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--grid", type=int, default=2**16)
    args = ap.parse_args()
    print(f"{'|z|':>8} {'grid':>12} {'closed form':>12} {'ratio to 1-|z|':>15}")
    for r in (0.3, 0.6, 0.9, 0.99, 0.999):
        grid = kn.shadow_measure(r, args.alpha, args.grid)
        exact = min(1.0, float(kn.shadow_halfwidth(r, args.alpha)) / np.pi)
        print(f"{r:8.3f} {grid:12.6g} {exact:12.6g} {exact / (1 - r):15.6g}")


if __name__ == "__main__":
    main()
