"""Growth weight theta, the D operator, and the four/six/eight-point
multipliers used by the modified energies, plus direct-summation
multilinear forms lambda_n.

All multiplier functions are vectorized: a sample on Gamma_n is passed as
``n`` broadcastable arrays (or a ``SimplexSample``), one per frequency slot.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import GridTooLarge
from .spectral import Field, Grid, fwd, inv

__all__ = [
    "ThetaProfile", "SimplexSample", "PsiHartree", "M4Dnls",
    "theta_eval", "psi_hartree", "m6_hartree", "m4_dnls", "sigma6_dnls",
    "m6_dnls", "m8_dnls", "lambda_n_eval", "QuarticForm", "d_operator",
    "LAMBDA_CAPS", "hartree_constant", "dnls_constant",
]

EPS_RES = 1e-9


def _quintic_transition(s: float) -> np.ndarray:
    """Coefficients (ascending) of p on [1, 2] with p = 1, p' = p'' = 0 at 1
    and matching t**s to second order at 2."""
    A = []
    rhs = []
    for t, vals in ((1.0, (1.0, 0.0, 0.0)),
                    (2.0, (2.0 ** s, s * 2.0 ** (s - 1), s * (s - 1) * 2.0 ** (s - 2)))):
        A.append([t ** j for j in range(6)])
        A.append([j * t ** (j - 1) if j >= 1 else 0.0 for j in range(6)])
        A.append([j * (j - 1) * t ** (j - 2) if j >= 2 else 0.0 for j in range(6)])
        rhs.extend(vals)
    return np.linalg.solve(np.array(A), np.array(rhs))


@dataclass(frozen=True)
class ThetaProfile:
    """theta(xi) = theta_0(|xi| / N): 1 below N, (|xi|/N)^s above 2N, and a
    fixed C^2 quintic bridge in between."""

    s: float
    N: float

    def __post_init__(self):
        if self.s < 1:
            raise ValueError(f"theta profile needs s >= 1, got {self.s}")
        if not self.N > 1:
            raise ValueError(f"theta profile needs N > 1, got {self.N}")

    @cached_property
    def transition(self) -> np.ndarray:
        return _quintic_transition(self.s)

    def _base(self, t, order):
        t = np.asarray(t, dtype=float)
        c = self.transition
        poly = np.polynomial.polynomial
        mid = (t > 1.0) & (t < 2.0)
        hi = t >= 2.0
        s = self.s
        out = np.zeros_like(t) if order else np.ones_like(t)
        tm = np.where(mid, t, 1.5)
        th = np.where(hi, t, 2.0)
        pc = c
        for _ in range(order):
            pc = poly.polyder(pc)
        out = np.where(mid, poly.polyval(tm, pc), out)
        if order == 0:
            out = np.where(hi, th ** s, out)
        elif order == 1:
            out = np.where(hi, s * th ** (s - 1), out)
        else:
            out = np.where(hi, s * (s - 1) * th ** (s - 2), out)
        return out

    def __call__(self, xi):
        return self._base(np.abs(xi) / self.N, 0)

    def derivative(self, xi, order: int = 1):
        """theta' or theta'' as a function of the signed frequency."""
        xi = np.asarray(xi, dtype=float)
        t = np.abs(xi) / self.N
        if order == 1:
            return np.sign(xi) * self._base(t, 1) / self.N
        if order == 2:
            return self._base(t, 2) / self.N ** 2
        raise ValueError("only first and second derivatives are available")


def theta_eval(p: ThetaProfile, xi):
    return p(xi)


def d_operator(f: Field, p: ThetaProfile) -> Field:
    """The operator with symbol theta."""
    return Field(f.grid, inv(p(f.grid.xi) * fwd(f.samples, f.grid), f.grid))


@dataclass(frozen=True, eq=False)
class SimplexSample:
    """Points on Gamma_n; the last coordinate is fixed by the zero sum."""

    n: int
    xi: np.ndarray

    @classmethod
    def from_free(cls, free) -> "SimplexSample":
        free = np.asarray(free, dtype=float)
        last = -np.sum(free, axis=0)
        return cls(free.shape[0] + 1, np.concatenate([free, last[None]], axis=0))

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        if self.n not in (4, 6, 8) or xi.shape[0] != self.n:
            raise ValueError(f"expected {self.n} frequency slots, got shape {xi.shape}")
        if np.any(np.abs(np.sum(xi, axis=0)) > 1e-12 * np.maximum(1.0, np.max(np.abs(xi), axis=0))):
            raise ValueError("sample is not on the zero-sum hyperplane")
        object.__setattr__(self, "xi", xi)

    def __iter__(self):
        return iter(self.xi)


def _slots(q, n):
    if isinstance(q, SimplexSample):
        if q.n != n:
            raise ValueError(f"expected a Gamma_{n} sample, got n={q.n}")
        return tuple(q.xi)
    q = tuple(np.asarray(a, dtype=float) for a in q)
    if len(q) != n:
        raise ValueError(f"expected {n} frequency slots, got {len(q)}")
    return q


def _resonance(x1, x2, x3, x4):
    return x1 ** 2 - x2 ** 2 + x3 ** 2 - x4 ** 2


def _off_resonance(omega, x1, x2, x3, x4, eps):
    scale = np.maximum(1.0, x1 ** 2 + x2 ** 2 + x3 ** 2 + x4 ** 2)
    return np.abs(omega) > eps * scale


@dataclass(frozen=True, eq=False)
class PsiHartree:
    """Correction multiplier for the Hartree modified energy.

    ``vhat`` is the (real, even) transform of the potential as a callable;
    ``c`` is the overall constant.  With the sign convention
    u_t = i u_xx - i sign (V*|u|^2) u the quartic time derivative of E^1 is
    cancelled by c = sign / 2 (see ``hartree_constant``).
    """

    theta: ThetaProfile
    vhat: Callable = field(default=lambda xi: np.ones_like(np.asarray(xi, dtype=float)))
    c: float = 1.0
    eps_res: float = EPS_RES

    def __call__(self, x1, x2, x3, x4):
        x1, x2, x3, x4 = (np.asarray(a, dtype=float) for a in (x1, x2, x3, x4))
        th = self.theta
        num = th(x1) ** 2 - th(x2) ** 2 + th(x3) ** 2 - th(x4) ** 2
        num = num * self.vhat(x3 + x4)
        om = _resonance(x1, x2, x3, x4)
        ok = _off_resonance(om, x1, x2, x3, x4, self.eps_res)
        return np.where(ok, self.c * num / np.where(ok, om, 1.0), 0.0)


def hartree_constant(sign: int) -> float:
    return 0.5 * sign


@dataclass(frozen=True, eq=False)
class M4Dnls:
    """Four-point correction multiplier for the gauged derivative NLS.

    ``c`` scales the whole symbol; c = -1/2 (``dnls_constant``) cancels the
    quartic part of dE^1/dt under w_t = i w_xx - w^2 conj(w)_x + ..."""

    theta: ThetaProfile
    eps_res: float = EPS_RES
    c: float = 1.0

    def numerator(self, x1, x2, x3, x4):
        th = self.theta
        return (th(x1) ** 2 * x3 + th(x2) ** 2 * x4
                + th(x3) ** 2 * x1 + th(x4) ** 2 * x2)

    def __call__(self, x1, x2, x3, x4):
        x1, x2, x3, x4 = (np.asarray(a, dtype=float) for a in (x1, x2, x3, x4))
        om = _resonance(x1, x2, x3, x4)
        ok = _off_resonance(om, x1, x2, x3, x4, self.eps_res)
        return np.where(ok, self.c * self.numerator(x1, x2, x3, x4) / np.where(ok, om, 1.0), 0.0)


def dnls_constant() -> float:
    return -0.5


def psi_hartree(q, m: PsiHartree):
    return m(*_slots(q, 4))


def m6_hartree(q, m: PsiHartree):
    """Alternating sum of M4 evaluated on the four contractions of a Gamma_6
    point, each weighted by V-hat of the contracted pair."""
    x1, x2, x3, x4, x5, x6 = _slots(q, 6)
    v = m.vhat
    return (m(x1 + x2 + x3, x4, x5, x6) * v(x1 + x2)
            - m(x1, x2 + x3 + x4, x5, x6) * v(x2 + x3)
            + m(x1, x2, x3 + x4 + x5, x6) * v(x3 + x4)
            - m(x1, x2, x3, x4 + x5 + x6) * v(x4 + x5))


def m4_dnls(q, m: M4Dnls):
    return m(*_slots(q, 4))


def sigma6_dnls(q, p: ThetaProfile):
    x = _slots(q, 6)
    return sum((-1) ** j * p(x[j]) ** 2 for j in range(6))


def m6_dnls(q, m: M4Dnls):
    x1, x2, x3, x4, x5, x6 = _slots(q, 6)
    return (m(x1 + x2 + x3, x4, x5, x6) * x2
            + m(x1, x2 + x3 + x4, x5, x6) * x3
            + m(x1, x2, x3 + x4 + x5, x6) * x4
            + m(x1, x2, x3, x4 + x5 + x6) * x5)


def m8_dnls(q, m: M4Dnls):
    x1, x2, x3, x4, x5, x6, x7, x8 = _slots(q, 8)
    return (m(x1 + x2 + x3 + x4 + x5, x6, x7, x8)
            - m(x1, x2 + x3 + x4 + x5 + x6, x7, x8)
            + m(x1, x2, x3 + x4 + x5 + x6 + x7, x8)
            - m(x1, x2, x3, x4 + x5 + x6 + x7 + x8))


# multilinear forms

LAMBDA_CAPS = {4: 128, 6: 48, 8: 24}


def _slot_coeffs(uhat: np.ndarray, grid: Grid):
    """Return (u_hat, ubar_hat) indexed by mode k + M/2.

    ubar_hat(xi) = conj(u_hat(-xi)).  The Nyquist mode has no -xi partner on
    the grid, so it is dropped from both slots to keep conjugate tuples paired."""
    M = grid.M
    a = np.zeros(M, dtype=complex)
    a[grid.k + M // 2] = uhat
    a[0] = 0.0
    b = np.zeros(M, dtype=complex)
    idx = np.arange(M) - M // 2
    src = -idx
    valid = (src >= -M // 2) & (src < M // 2)
    b[valid] = np.conj(a[src[valid] + M // 2])
    return a, b


def _enumerate_tuples(n: int, active_odd: np.ndarray, active_even: np.ndarray, M: int,
                      chunk: int = 1 << 20):
    """Yield index arrays (shape (n, T)) of tuples with exact zero index sum.

    Indices are shifted mode numbers in [0, M); slots alternate odd/even
    activity sets.  The zero-sum constraint is on mode numbers, with no
    wrap-around."""
    sets = [active_odd if j % 2 == 0 else active_even for j in range(n)]
    last_set = np.zeros(M, dtype=bool)
    last_set[sets[n - 1]] = True
    shift = M // 2
    free = sets[: n - 1]
    # iterate over the first slot to bound memory
    rest = np.stack(np.meshgrid(*free[1:], indexing="ij"), axis=0).reshape(n - 2, -1)
    rest_sum = np.sum(rest - shift, axis=0)
    for i0 in free[0]:
        tot = (i0 - shift) + rest_sum
        last = -tot + shift
        ok = (last >= 0) & (last < M)
        ok[ok] = last_set[last[ok]]
        if not np.any(ok):
            continue
        idx = np.empty((n, int(ok.sum())), dtype=np.int64)
        idx[0] = i0
        idx[1:n - 1] = rest[:, ok]
        idx[n - 1] = last[ok]
        for start in range(0, idx.shape[1], chunk):
            yield idx[:, start:start + chunk]


def lambda_n_eval(mult, f: Field, n: int) -> complex:
    """Direct lattice sum of the n-linear form with symbol ``mult``.

    Sums mult(xi_1..xi_n) * prod h_j(xi_j) over grid tuples whose integer
    mode indices sum to zero, with h_j = u_hat for odd j and
    h_j(xi) = conj(u_hat(-xi)) for even j, times (1/L)^(n-1)."""
    if n not in LAMBDA_CAPS:
        raise ValueError(f"n must be one of {sorted(LAMBDA_CAPS)}")
    grid = f.grid
    if grid.M > LAMBDA_CAPS[n]:
        raise GridTooLarge(f"direct lambda_{n} summation is capped at M={LAMBDA_CAPS[n]}, got {grid.M}")
    a, b = _slot_coeffs(fwd(f.samples, grid), grid)
    act_a = np.flatnonzero(a)
    act_b = np.flatnonzero(b)
    if act_a.size == 0 or act_b.size == 0:
        return 0j
    xi_of = (np.arange(grid.M) - grid.M // 2) * grid.dxi
    total = 0j
    for idx in _enumerate_tuples(n, act_a, act_b, grid.M):
        w = mult(*(xi_of[i] for i in idx))
        prod = np.ones(idx.shape[1], dtype=complex)
        for j in range(n):
            prod = prod * (a if j % 2 == 0 else b)[idx[j]]
        total += np.sum(w * prod)
    return complex(total / grid.L ** (n - 1))


class QuarticForm:
    """lambda_4 with a fixed symbol, precomputed on all lattice tuples of
    a grid (restricted to ``keep`` modes) for repeated evaluation."""

    def __init__(self, mult, grid: Grid, keep: np.ndarray | None = None):
        if grid.M > LAMBDA_CAPS[4]:
            raise GridTooLarge(f"direct lambda_4 summation is capped at M={LAMBDA_CAPS[4]}, got {grid.M}")
        self.grid = grid
        M = grid.M
        if keep is None:
            keep = np.ones(M, dtype=bool)
        keep_shifted = np.zeros(M, dtype=bool)
        keep_shifted[grid.k + M // 2] = np.asarray(keep, dtype=bool)
        keep_shifted[0] = False  # Nyquist slot has no conjugate partner
        act = np.flatnonzero(keep_shifted)
        xi_of = (np.arange(M) - M // 2) * grid.dxi
        idx_parts, w_parts = [], []
        for idx in _enumerate_tuples(4, act, act, M):
            w = mult(*(xi_of[i] for i in idx))
            nz = w != 0
            idx_parts.append(idx[:, nz])
            w_parts.append(w[nz])
        self.idx = np.concatenate(idx_parts, axis=1) if idx_parts else np.zeros((4, 0), dtype=np.int64)
        self.w = np.concatenate(w_parts) if w_parts else np.zeros(0)

    def __call__(self, f: Field) -> complex:
        return self.from_coeffs(fwd(f.samples, f.grid))

    def from_coeffs(self, uhat: np.ndarray) -> complex:
        a, b = _slot_coeffs(uhat, self.grid)
        i1, i2, i3, i4 = self.idx
        s = np.sum(self.w * a[i1] * b[i2] * a[i3] * b[i4])
        return complex(s / self.grid.L ** 3)

    def directional(self, uhat: np.ndarray, vhat: np.ndarray) -> complex:
        """d/de lambda_4(u + e v) at e = 0, exactly (product rule per slot)."""
        a, b = _slot_coeffs(uhat, self.grid)
        da, db = _slot_coeffs(vhat, self.grid)
        i1, i2, i3, i4 = self.idx
        s = np.sum(self.w * (da[i1] * b[i2] * a[i3] * b[i4] + a[i1] * db[i2] * a[i3] * b[i4]
                             + a[i1] * b[i2] * da[i3] * b[i4] + a[i1] * b[i2] * a[i3] * db[i4]))
        return complex(s / self.grid.L ** 3)
