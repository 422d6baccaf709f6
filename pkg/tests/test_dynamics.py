import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dispersive_bench.dynamics import (INCREMENT_RESOLUTION, IntegratorConfig, correction_multiplier, evolve,
                                       fit_correction_constant, increment_sweep, measure_increment,
                                       modified_energy_sweep, track_modified_energies)
from dispersive_bench.equations import cubic_nls, gauged_dnls, gaussian_potential, hartree
from dispersive_bench.errors import DeltaTooSmall, NonFinite, SmallnessViolated
from dispersive_bench.ladder import classical_invariants
from dispersive_bench.multipliers import M4Dnls, PsiHartree, ThetaProfile
from dispersive_bench.spectral import Field, Grid, field_from_function, fwd, inv


def gaussian_data(grid, a=1.0, w=1.0, v=0.0):
    return field_from_function(grid, lambda x: a * np.exp(-(x / w) ** 2 + 1j * v * x))


def band_limited(grid, kmax, amp, seed):
    rng = np.random.default_rng(seed)
    c = np.where(np.abs(grid.k) <= kmax, rng.standard_normal(grid.M) + 1j * rng.standard_normal(grid.M), 0)
    return Field(grid, amp * inv(c * grid.L, grid))


@pytest.mark.parametrize("kw", [dict(scheme="euler"), dict(dt=0.0), dict(T=-1.0),
                                dict(dealias_fraction=1.5), dict(record_every=0)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        IntegratorConfig(**kw)


@pytest.mark.parametrize("scheme", ["ifrk4", "strang"])
def test_linear_flow_is_pure_phase(scheme):
    g = Grid(40.0, 256)
    phi = gaussian_data(g, v=1.0)
    traj = evolve(cubic_nls(1), phi, IntegratorConfig(scheme, dt=0.01, T=1.0, record_every=10), nonlinear=False)
    a0 = np.abs(traj.spectra[0])
    for row in traj.spectra:
        assert np.array_equal(np.abs(row), a0) or np.max(np.abs(np.abs(row) - a0)) <= 4e-16 * a0.max()


def test_soliton_short():
    g = Grid(40 * np.pi, 1024)
    phi = field_from_function(g, lambda x: np.sqrt(2) / np.cosh(x))
    traj = evolve(cubic_nls(-1), phi, IntegratorConfig(dt=1e-3, T=1.0, record_every=100))
    for f, t in zip(traj.fields, traj.times):
        exact = np.sqrt(2) / np.cosh(g.x) * np.exp(1j * t)
        assert np.linalg.norm(f.samples - exact) / np.linalg.norm(exact) <= 1e-6


def test_strang_soliton_converges():
    g = Grid(40 * np.pi, 512)
    phi = field_from_function(g, lambda x: np.sqrt(2) / np.cosh(x))
    errs = []
    for dt in (0.01, 0.005):
        traj = evolve(cubic_nls(-1), phi, IntegratorConfig("strang", dt=dt, T=0.5, record_every=int(0.5 / dt)))
        exact = np.sqrt(2) / np.cosh(g.x) * np.exp(0.5j)
        errs.append(np.linalg.norm(traj.fields[-1].samples - exact) / np.linalg.norm(exact))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)


def test_mass_conservation_defocusing():
    g = Grid(40 * np.pi, 1024)
    traj = evolve(cubic_nls(1), gaussian_data(g, 0.8, 2.0, 0.5), IntegratorConfig(dt=0.01, T=2.0, record_every=20))
    m = [classical_invariants(traj.spec, f)["mass"] for f in traj.fields]
    assert np.max(np.abs(np.array(m) - m[0])) / m[0] <= 1e-10


def test_backward_run_returns():
    g = Grid(40.0, 256)
    phi = gaussian_data(g, 0.5, 1.5, 0.2)
    cfg = IntegratorConfig(dt=0.005, T=0.5, record_every=100)
    fwd_run = evolve(cubic_nls(1), phi, cfg)
    back = evolve(cubic_nls(1), fwd_run.fields[-1], cfg, backward=True)
    assert back.times[-1] == pytest.approx(-0.5)
    assert np.linalg.norm(back.fields[-1].samples - phi.samples) <= 1e-8 * np.linalg.norm(phi.samples)


def test_dnls_requires_small_data():
    g = Grid(40.0, 256)
    with pytest.raises(SmallnessViolated):
        evolve(gauged_dnls(), gaussian_data(g, 3.0), IntegratorConfig())
    with pytest.raises(ValueError):
        evolve(gauged_dnls(), gaussian_data(g, 0.5), IntegratorConfig("strang"))


def test_dnls_hamiltonian_conserved():
    g = Grid(40 * np.pi, 1024)
    phi = gaussian_data(g, 0.7, 1.5, 0.3)
    traj = evolve(gauged_dnls(), phi, IntegratorConfig(dt=2e-3, T=2.0, record_every=100))
    H = np.array([classical_invariants(traj.spec, f)["energy"] for f in traj.fields])
    assert np.max(np.abs(H - H[0])) / abs(H[0]) <= 1e-6


def test_blow_up_reports_step():
    g = Grid(10.0, 128)
    phi = gaussian_data(g, 100.0, 0.5)
    with np.errstate(all="ignore"), pytest.raises(NonFinite) as exc:
        evolve(cubic_nls(1), phi, IntegratorConfig(dt=0.1, T=5.0, record_every=1))
    assert exc.value.step == 2


# increments

def _run(nonlinear=True):
    g = Grid(20.0, 512)
    phi = gaussian_data(g, 1.0, 0.3)
    return evolve(cubic_nls(1), phi, IntegratorConfig(dt=2e-3, T=0.4, record_every=5), nonlinear=nonlinear)


def test_linear_increments_vanish_exactly():
    traj = _run(nonlinear=False)
    for N in (2, 8, 32):
        inc = measure_increment(traj, 2.5, N, 0.1)
        assert inc.delta.size > 0 and np.all(inc.delta == 0)
    vals, fit = increment_sweep(traj, 2.5, [4, 8, 16], 0.1)
    assert fit.degenerate and fit.slope == 0


def test_increment_above_nyquist_vanishes():
    traj = _run()
    inc = measure_increment(traj, 2.5, traj.grid.nyquist * 2, 0.1)
    assert np.all(inc.delta == 0)


def test_increment_lag_validation():
    traj = _run()
    with pytest.raises(DeltaTooSmall):
        measure_increment(traj, 2.5, 4, 0.001)
    with pytest.raises(DeltaTooSmall):
        measure_increment(traj, 2.5, 4, 0.015)


def test_increments_decay_in_N():
    vals, fit = increment_sweep(_run(), 2.5, [4, 8, 16, 32], 0.1)
    assert np.all(vals > 0) and fit.slope < 0


def test_resolution_floor_value():
    assert INCREMENT_RESOLUTION == 16 * np.finfo(float).eps


# modified energies

def test_static_state_has_no_drift():
    g = Grid(8.0, 32)
    phi = band_limited(g, 6, 0.1, 0)
    traj = evolve(cubic_nls(1), phi, IntegratorConfig(dt=0.01, T=0.3, record_every=5),
                  nonlinear=False, dispersion=False)
    p = ThetaProfile(1.5, 2.0)
    rep = track_modified_energies(traj, p, correction_multiplier(traj.spec, p), 0.1)
    assert rep.max_drift_E1 == 0 and rep.max_drift_E2 == 0


def test_theta_trivial_above_nyquist():
    g = Grid(8.0, 32)
    traj = evolve(cubic_nls(1), band_limited(g, 8, 0.3, 1), IntegratorConfig(dt=2e-4, T=0.3, record_every=250))
    p = ThetaProfile(1.5, g.nyquist * 1.01)
    rep = track_modified_energies(traj, p, PsiHartree(p), 0.1)
    mass = np.array([classical_invariants(traj.spec, f)["mass"] for f in traj.fields])
    assert np.allclose(rep.E1, mass, rtol=1e-12)
    assert rep.max_drift_E1 <= 1e-10


@pytest.mark.parametrize("kind, sign, expected", [
    ("cubic", 1, 0.5), ("cubic", -1, -0.5), ("hartree", 1, 0.5), ("hartree", -1, -0.5), ("dnls", 1, -0.5)])
def test_correction_constant_fit(kind, sign, expected):
    g = Grid(8.0, 64)
    phi = band_limited(g, 8, 1e-4, 42)
    spec = {"cubic": lambda: cubic_nls(sign), "hartree": lambda: hartree(gaussian_potential(g, 0.3), sign),
            "dnls": gauged_dnls}[kind]()
    p = ThetaProfile(1.5, 2.0)
    base = correction_multiplier(spec, p, c=1.0)
    c = fit_correction_constant(spec, phi, p, base)
    assert c == pytest.approx(expected, rel=1e-4)


def test_modified_energy_improves_on_E1():
    g = Grid(2.0, 64)
    V = gaussian_potential(g, 0.1)
    rng = np.random.default_rng(7)
    from dispersive_bench.spectral import dealias_mask
    uh = (1 + g.xi ** 2) ** (-0.875) * np.exp(2j * np.pi * rng.random(g.M)) * dealias_mask(g, 0.5)
    u = inv(uh, g)
    u /= np.sqrt(g.dx * np.sum(np.abs(u) ** 2))
    traj = evolve(hartree(V), Field(g, u), IntegratorConfig(dt=1e-4, T=0.2, record_every=100, dealias_fraction=0.5))
    reps, fit = modified_energy_sweep(traj, 1.5, [4, 8, 16], 0.1)
    for r in reps:
        assert r.max_drift_E2 < r.max_drift_E1
        assert np.all(np.abs(r.E2 / r.E1 - 1) < 0.5)
    assert fit.slope < -2
