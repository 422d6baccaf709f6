import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dispersive_bench.multipliers import (LAMBDA_CAPS, M4Dnls, PsiHartree, QuarticForm, SimplexSample,
                                          ThetaProfile, d_operator, dnls_constant, hartree_constant,
                                          lambda_n_eval, m4_dnls, m6_dnls, m6_hartree, m8_dnls,
                                          psi_hartree, sigma6_dnls, theta_eval)
from dispersive_bench.errors import GridTooLarge
from dispersive_bench.spectral import Field, Grid, Spectrum, inverse_transform, fwd

finite = st.floats(-500, 500, allow_nan=False)


def test_theta_values():
    p = ThetaProfile(2.0, 8.0)
    assert theta_eval(p, 0.0) == 1.0
    assert theta_eval(p, 32.0) == pytest.approx(16.0, rel=1e-15)
    assert theta_eval(p, 16.0) == pytest.approx(4.0, rel=1e-15)


@pytest.mark.parametrize("s, N", [(0.5, 8), (1.5, 1.0)])
def test_theta_rejects(s, N):
    with pytest.raises(ValueError):
        ThetaProfile(s, N)


@settings(max_examples=50, deadline=None)
@given(xi=st.lists(finite, min_size=1, max_size=50), s=st.sampled_from([1.0, 1.5, 2.5]))
def test_theta_even_and_at_least_one(xi, s):
    p = ThetaProfile(s, 8.0)
    xi = np.array(xi)
    assert np.array_equal(p(xi), p(-xi))
    assert np.all(p(xi) >= 1.0)


@pytest.mark.parametrize("s", [1.0, 1.5, 2.0, 2.5, 3.0])
def test_theta_monotone_and_c2(s):
    p = ThetaProfile(s, 4.0)
    x = np.linspace(0, 40, 40001)
    assert np.all(np.diff(p(x)) >= -1e-14)
    h = 1e-6
    for edge in (4.0, 8.0):
        for order in (0, 1, 2):
            f = (lambda z: p(z)) if order == 0 else (lambda z, o=order: p.derivative(z, o))
            assert abs(f(edge + h) - f(edge - h)) < 1e-4


@settings(max_examples=40, deadline=None)
@given(x=finite, y=finite, s=st.sampled_from([1.0, 1.5, 2.5]))
def test_theta_quasi_subadditive(x, y, s):
    p = ThetaProfile(s, 8.0)
    assert p(x + y) <= 2 ** s * (p(x) + p(y)) * (1 + 1e-12)


def _derivative_constants(s):
    p = ThetaProfile(s, 8.0)
    x = np.linspace(1, 400, 400001)
    c1 = np.max(np.abs(p.derivative(x, 1)) * x / p(x))
    c2 = np.max(np.abs(p.derivative(x, 2)) * x ** 2 / p(x))
    return c1, c2


@pytest.mark.parametrize("s", [1.0, 1.5, 2.0, 2.5, 3.0])
def test_theta_first_derivative_constant(s):
    c1, _ = _derivative_constants(s)
    assert c1 <= 4 * s * s


@pytest.mark.parametrize("s", [
    pytest.param(1.0, marks=pytest.mark.xfail(strict=True, reason="quintic bridge has C2 = 5.83 > 4")),
    pytest.param(1.5, marks=pytest.mark.xfail(strict=True, reason="quintic bridge has C2 = 9.60 > 9")),
    2.0, 2.5, 3.0])
def test_theta_second_derivative_constant(s):
    _, c2 = _derivative_constants(s)
    assert c2 <= 4 * s * s


def test_d_operator_is_identity_below_N():
    g = Grid(2 * np.pi, 32)
    f = Field(g, np.exp(1j * g.x))
    assert np.allclose(d_operator(f, ThetaProfile(2.0, 8.0)).samples, f.samples, atol=1e-14)


def test_simplex_sample():
    q = SimplexSample.from_free([1.0, 2.0, 3.0])
    assert q.xi[-1] == -6.0
    with pytest.raises(ValueError):
        SimplexSample(4, np.array([1.0, 1.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        SimplexSample(5, np.zeros(5))


def test_psi_resonant_zero():
    m = PsiHartree(ThetaProfile(1.5, 8.0))
    a = 37.0
    assert psi_hartree((a, a, -a, -a), m) == 0.0
    assert psi_hartree((a, -a, 5.0, -5.0), m) == 0.0


def test_psi_dual_formula():
    p = ThetaProfile(1.5, 8.0)
    m = PsiHartree(p)
    q = (20.0, -4.0, -6.0, -10.0)
    direct = psi_hartree(q, m)
    x1, x2, x3, x4 = q
    num = p(x1) ** 2 - p(x2) ** 2 + p(x3) ** 2 - p(x4) ** 2
    fact = num / (2 * (x1 + x2) * (x1 + x4))
    assert direct == pytest.approx(fact, rel=1e-12, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(a=finite, b=finite, c=finite)
def test_factorization_identity(a, b, c):
    d = -(a + b + c)
    assert a * a - b * b + c * c - d * d == pytest.approx(2 * (a + b) * (a + d), rel=1e-9, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(a=finite, b=finite, c=finite)
def test_psi_pair_symmetry(a, b, c):
    d = -(a + b + c)
    m = PsiHartree(ThetaProfile(2.0, 8.0))
    assert m(a, b, c, d) == pytest.approx(m(c, d, a, b), rel=1e-12, abs=1e-12)


def test_m6_hartree_zero_and_parity():
    V = lambda xi: np.exp(-(0.1 * np.asarray(xi)) ** 2 / 4)
    m = PsiHartree(ThetaProfile(1.5, 8.0), V)
    assert m6_hartree((0.0,) * 6, m) == 0.0
    rng = np.random.default_rng(3)
    for _ in range(20):
        q = SimplexSample.from_free(rng.uniform(-60, 60, 5))
        assert m6_hartree(q, m) == pytest.approx(m6_hartree(SimplexSample(6, -q.xi), m), rel=1e-12, abs=1e-14)


def test_m6_hartree_term_by_term():
    p = ThetaProfile(1.5, 8.0)
    V = lambda xi: np.exp(-(0.1 * np.asarray(xi, dtype=float)) ** 2 / 4)
    m = PsiHartree(p, V)

    def psi(a, b, c, d):
        om = a * a - b * b + c * c - d * d
        if abs(om) <= 1e-9 * max(1.0, a * a + b * b + c * c + d * d):
            return 0.0
        return (p(a) ** 2 - p(b) ** 2 + p(c) ** 2 - p(d) ** 2) * V(c + d) / om

    rng = np.random.default_rng(11)
    for _ in range(25):
        x = list(rng.uniform(-60, 60, 5))
        x.append(-sum(x))
        x1, x2, x3, x4, x5, x6 = x
        ref = (psi(x1 + x2 + x3, x4, x5, x6) * V(x1 + x2) - psi(x1, x2 + x3 + x4, x5, x6) * V(x2 + x3)
               + psi(x1, x2, x3 + x4 + x5, x6) * V(x3 + x4) - psi(x1, x2, x3, x4 + x5 + x6) * V(x4 + x5))
        assert m6_hartree(x, m) == pytest.approx(ref, rel=1e-12, abs=1e-14)


def test_dnls_multipliers_basic():
    p = ThetaProfile(1.5, 8.0)
    m = M4Dnls(p)
    assert m.numerator(0.0, 0.0, 0.0, 0.0) == 0.0
    assert sigma6_dnls((3.0, 3.0, -7.0, -7.0, 4.0, 4.0), p) == 0.0
    rng = np.random.default_rng(5)
    for n, fn in ((6, m6_dnls), (8, m8_dnls)):
        q = SimplexSample.from_free(rng.uniform(-40, 40, n - 1))
        assert np.isfinite(fn(q, m))
    with pytest.raises(ValueError):
        m4_dnls(SimplexSample.from_free([1.0, 2.0, 3.0, 4.0, 5.0]), m)


def test_constants():
    assert hartree_constant(1) == 0.5
    assert hartree_constant(-1) == -0.5
    assert dnls_constant() == -0.5


def _two_mode_field():
    g = Grid(2 * np.pi, 8)
    c = np.zeros(8, dtype=complex)
    c[1] = 2 * np.pi * (1.0 + 0.5j)
    c[-2] = 2 * np.pi * (0.3 - 0.2j)
    return g, c, inverse_transform(Spectrum(g, c))


def test_lambda_zero_and_resonant():
    g = Grid(2 * np.pi, 8)
    z = Field(g, np.zeros(8))
    m = PsiHartree(ThetaProfile(1.5, 2.0))
    assert lambda_n_eval(m, z, 4) == 0
    const = Field(g, np.ones(8))
    assert lambda_n_eval(m, const, 4) == 0


def test_lambda_two_modes_enumeration():
    g, c, f = _two_mode_field()
    uhat = fwd(f.samples, g)
    modes = {int(k): uhat[i] for i, k in enumerate(g.k) if abs(uhat[i]) > 1e-12}
    total = 0j
    for k1 in modes:
        for k2 in modes:
            for k3 in modes:
                for k4 in modes:
                    if k1 - k2 + k3 - k4 == 0:
                        total += modes[k1] * np.conj(modes[k2]) * modes[k3] * np.conj(modes[k4])
    total /= g.L ** 3
    one = lambda *x: np.ones_like(x[0])
    assert lambda_n_eval(one, f, 4) == pytest.approx(total, rel=1e-12)


def test_lambda_real_for_symmetric_symbol():
    rng = np.random.default_rng(2)
    g = Grid(4.0, 16)
    f = Field(g, rng.standard_normal(16) + 1j * rng.standard_normal(16))
    val = lambda_n_eval(PsiHartree(ThetaProfile(1.5, 2.0)), f, 4)
    assert abs(val.imag) <= 1e-10 * max(1.0, abs(val))


def test_lambda_caps():
    g = Grid(10.0, LAMBDA_CAPS[6] * 2)
    with pytest.raises(GridTooLarge):
        lambda_n_eval(lambda *x: 1.0, Field(g, np.ones(g.M)), 6)
    with pytest.raises(ValueError):
        lambda_n_eval(lambda *x: 1.0, Field(Grid(10.0, 8), np.ones(8)), 5)


def test_quartic_form_matches_direct_sum():
    rng = np.random.default_rng(4)
    g = Grid(4.0, 16)
    f = Field(g, rng.standard_normal(16) + 1j * rng.standard_normal(16))
    m = PsiHartree(ThetaProfile(1.5, 2.0))
    assert QuarticForm(m, g)(f) == pytest.approx(lambda_n_eval(m, f, 4), rel=1e-12)


def test_quartic_directional_matches_finite_difference():
    rng = np.random.default_rng(8)
    g = Grid(4.0, 16)
    u = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    form = QuarticForm(M4Dnls(ThetaProfile(1.5, 2.0)), g)
    h = 1e-6
    fd = (form.from_coeffs(u + h * v) - form.from_coeffs(u - h * v)) / (2 * h)
    assert form.directional(u, v) == pytest.approx(fd, rel=1e-7)


def test_lambda6_small_grid():
    g = Grid(2 * np.pi, 8)
    c = np.zeros(8, dtype=complex)
    c[[0, 1, -1]] = 2 * np.pi * np.array([1.0, 0.3j, 0.2])
    f = inverse_transform(Spectrum(g, c))
    one = lambda *x: np.ones_like(x[0])
    # with a unit symbol lambda_6 is the integral of |u|^6 over the period
    assert lambda_n_eval(one, f, 6).real == pytest.approx(g.dx * np.sum(np.abs(f.samples) ** 6), rel=1e-10)
