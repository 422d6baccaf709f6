"""Pick the ladder coupling by conservation: evolve the cubic NLS and report
the drift of int P_k for candidate couplings under dt refinement."""
import argparse
from fractions import Fraction

import numpy as np

from dispersive_bench.dynamics import IntegratorConfig, evolve
from dispersive_bench.equations import cubic_nls
from dispersive_bench.ladder import conserved_series
from dispersive_bench.spectral import Field, Grid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k-max", type=int, default=5)
    ap.add_argument("--T", type=float, default=2.0)
    ap.add_argument("--couplings", default="1/2,1")
    args = ap.parse_args()
    g = Grid(40 * np.pi, 1024)
    phi = Field(g, 0.8 * np.exp(-(g.x / 2) ** 2 + 0.5j * g.x))
    for sign in (1, -1):
        for dt in (0.01, 0.005):
            tr = evolve(cubic_nls(sign), phi, IntegratorConfig("ifrk4", dt, args.T, record_every=int(round(0.1 / dt))))
            for kap in args.couplings.split(","):
                kappa = Fraction(kap) * sign
                reps = conserved_series(tr.fields, tr.times, k_max=args.k_max, coupling=kappa)
                drifts = " ".join(f"{r.name}={r.drift:.1e}" for r in reps)
                print(f"sign={sign:+d} dt={dt:<6} kappa={str(kappa):>4}  {drifts}")


if __name__ == "__main__":
    main()
