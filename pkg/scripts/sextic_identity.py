"""Check that with the fitted constant the time derivative of E^2 equals the
sextic form -i sign lambda_6(M_6) exactly (Hartree)."""
import numpy as np

from dispersive_bench.equations import gaussian_potential, hartree, nonlinear_term
from dispersive_bench.multipliers import PsiHartree, ThetaProfile, hartree_constant, lambda_n_eval, m6_hartree
from dispersive_bench.spectral import Field, Grid, fwd, inv


def main():
    g = Grid(2 * np.pi, 32)
    rng = np.random.default_rng(3)
    uh = np.where(np.abs(g.k) <= 4, rng.normal(size=32) + 1j * rng.normal(size=32), 0) * 6
    th = ThetaProfile(1.5, 2.0)
    for sign in (1, -1):
        V = gaussian_potential(g, 0.3)
        spec = hartree(V, sign)
        m4 = PsiHartree(th, V.vhat, c=hartree_constant(sign))
        u = inv(uh, g)
        ut = -1j * g.xi ** 2 * uh + fwd(-1j * nonlinear_term(spec, u, g), g)

        def E2(c):
            return np.sum(th(g.xi) ** 2 * abs(c) ** 2) / g.L + lambda_n_eval(m4, Field(g, inv(c, g)), 4).real

        e = 1e-3
        d = (-E2(uh + 2 * e * ut) + 8 * E2(uh + e * ut) - 8 * E2(uh - e * ut) + E2(uh - 2 * e * ut)) / (12 * e)
        l6 = lambda_n_eval(lambda *x: m6_hartree(x, m4), Field(g, u), 6)
        print(f"sign={sign:+d} dE2/dt={d:.12e} -i*sign*lambda6={(-1j * sign * l6).real:.12e}")


if __name__ == "__main__":
    main()
