"""Fit the constant of each quartic correction symbol by zeroing dE^2/dt at
t = 0 on small random band-limited data, for decreasing amplitudes."""
import argparse

import numpy as np

from dispersive_bench.dynamics import correction_multiplier, fit_correction_constant
from dispersive_bench.equations import cubic_nls, gauged_dnls, gaussian_potential, hartree
from dispersive_bench.multipliers import ThetaProfile
from dispersive_bench.spectral import Field, Grid, inv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=float, default=1.5)
    ap.add_argument("--N", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    g = Grid(8.0, 64)
    rng = np.random.default_rng(args.seed)
    c0 = np.where(np.abs(g.k) <= 8, rng.standard_normal(g.M) + 1j * rng.standard_normal(g.M), 0) * g.L
    p = ThetaProfile(args.s, args.N)
    specs = {"cubic+": cubic_nls(1), "cubic-": cubic_nls(-1),
             "hartree+": hartree(gaussian_potential(g, 0.3), 1), "hartree-": hartree(gaussian_potential(g, 0.3), -1),
             "dnls": gauged_dnls()}
    for name, spec in specs.items():
        base = correction_multiplier(spec, p, c=1.0)
        row = []
        for amp in (1e-2, 1e-3, 1e-4):
            row.append(fit_correction_constant(spec, Field(g, amp * inv(c0, g)), p, base))
        print(f"{name:9s}", "  ".join(f"{c:+.8f}" for c in row))


if __name__ == "__main__":
    main()
