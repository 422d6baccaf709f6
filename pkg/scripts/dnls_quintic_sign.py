"""Hamiltonian drift of the gauged DNLS for both signs of the quintic term;
only the conserving sign is kept in the library."""
import numpy as np

import dispersive_bench.dynamics as dyn
from dispersive_bench.dynamics import IntegratorConfig, evolve
from dispersive_bench.equations import gauged_dnls, nonlinear_term
from dispersive_bench.ladder import classical_invariants
from dispersive_bench.spectral import Field, Grid, fwd, inv


def flipped(spec, u, grid):
    ub_x = inv(1j * grid.xi * fwd(np.conj(u), grid), grid)
    return -1j * u * u * ub_x + 0.5 * np.abs(u) ** 4 * u


def main():
    g = Grid(40 * np.pi, 1024)
    phi = Field(g, 0.7 * np.exp(-(g.x / 1.5) ** 2 + 0.3j * g.x))
    for label, fn in (("library", nonlinear_term), ("flipped", flipped)):
        dyn.nonlinear_term = fn
        for dt in (4e-3, 2e-3):
            tr = evolve(gauged_dnls(), phi, IntegratorConfig(dt=dt, T=2.0, record_every=int(round(0.1 / dt))))
            H = np.array([classical_invariants(tr.spec, f)["energy"] for f in tr.fields])
            print(f"{label:8s} dt={dt:g} max rel Hamiltonian drift {np.max(np.abs(H - H[0])) / abs(H[0]):.2e}")
    dyn.nonlinear_term = nonlinear_term


if __name__ == "__main__":
    main()
