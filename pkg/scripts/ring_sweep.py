"""Print the ring maxima of the kernel integral for one scenario as CSV (radius, max, min)."""

import argparse
import csv
import sys

from hardyop import estimators as est
from hardyop.scenario import load_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("scenario")
    ap.add_argument("--method", choices=("adaptive", "trapezoid"), default="adaptive")
    args = ap.parse_args()
    s = load_scenario(args.scenario)
    trace = est.ring_sweep(s.u, s.phi, s.p, s.q, s.config.ring_schedule(), method=args.method,
                           M=s.config.kernel_grid, tol=s.config.quad_tol)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["radius", "max", "min"])
    for r, hi, lo in zip(trace.radii, trace.maxima, trace.minima):
        w.writerow([repr(r), repr(hi), repr(lo)])


if __name__ == "__main__":
    main()
