"""Equation definitions: cubic NLS, Hartree with an even non-negative
potential, and the gauge-transformed derivative NLS.

Every variant is written as  i u_t + u_xx = N(u)  and ``nonlinearity``
returns N(u) with the focusing/defocusing sign already applied, so the
evolution is always  u_t = i u_xx - i N(u).  For the gauged DNLS,

    N(w) = -i w^2 conj(w)_x - (1/2) |w|^4 w,

i.e.  w_t = i w_xx - w^2 conj(w)_x + (i/2) |w|^4 w.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .spectral import Field, Grid, fwd, inv, l2_norm

log = logging.getLogger(__name__)

__all__ = [
    "PotentialSpec", "gaussian_potential", "exponential_potential", "custom_potential",
    "potential_from_file", "EquationSpec", "cubic_nls", "hartree", "gauged_dnls",
    "nonlinearity", "gauge_forward", "gauge_inverse", "smallness_check",
    "SmallnessResult", "check_potential", "PotentialReport", "SMALLNESS_THRESHOLD",
]

SMALLNESS_THRESHOLD = float(np.sqrt(2.0 * np.pi))


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """Convolution potential V sampled on a grid, with its transform.

    ``shape`` is one of 'gaussian', 'exponential', 'custom'.  Analytic
    shapes carry a closed-form transform valid at any frequency; custom
    samples are transformed by a direct sum."""

    shape: str
    grid: Grid
    params: dict = field(default_factory=dict)
    custom_samples: np.ndarray | None = None

    @cached_property
    def samples(self) -> np.ndarray:
        x = self.grid.x
        if self.shape == "gaussian":
            w = self.params["width"]
            m = self.params.get("mass", 1.0)
            v = m * np.exp(-(x / w) ** 2) / (w * np.sqrt(np.pi))
        elif self.shape == "exponential":
            r = self.params["rate"]
            m = self.params.get("mass", 1.0)
            v = 0.5 * m * r * np.exp(-r * np.abs(x))
        elif self.shape == "custom":
            v = np.asarray(self.custom_samples, dtype=float)
        else:
            raise ValueError(f"unknown potential shape {self.shape!r}")
        v = np.array(v, dtype=float)
        v.setflags(write=False)
        return v

    def vhat(self, xi):
        """Transform of V at arbitrary frequencies (real part; V even)."""
        xi = np.asarray(xi, dtype=float)
        if self.shape == "gaussian":
            w = self.params["width"]
            return self.params.get("mass", 1.0) * np.exp(-(xi * w) ** 2 / 4.0)
        if self.shape == "exponential":
            r = self.params["rate"]
            return self.params.get("mass", 1.0) * r ** 2 / (r ** 2 + xi ** 2)
        flat = xi.ravel()
        uniq, inv_idx = np.unique(flat, return_inverse=True)
        vals = np.empty(uniq.shape)
        x = self.grid.x
        for start in range(0, uniq.size, 256):
            block = uniq[start:start + 256]
            vals[start:start + 256] = self.grid.dx * np.real(
                np.exp(-1j * np.outer(block, x)) @ self.samples)
        return vals[inv_idx].reshape(xi.shape)

    @cached_property
    def vhat_grid(self) -> np.ndarray:
        return self.vhat(self.grid.xi)


def gaussian_potential(grid: Grid, width: float, mass: float = 1.0) -> PotentialSpec:
    return PotentialSpec("gaussian", grid, {"width": float(width), "mass": float(mass)})


def exponential_potential(grid: Grid, rate: float, mass: float = 1.0) -> PotentialSpec:
    return PotentialSpec("exponential", grid, {"rate": float(rate), "mass": float(mass)})


def custom_potential(grid: Grid, samples) -> PotentialSpec:
    return PotentialSpec("custom", grid, {}, np.asarray(samples, dtype=float))


def potential_from_file(grid: Grid, path) -> PotentialSpec:
    """Two-column text file (x, V(x)), linearly interpolated onto the grid
    and set to zero outside the tabulated range."""
    data = np.loadtxt(path, ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns, got {data.shape[1]}")
    order = np.argsort(data[:, 0])
    xs, vs = data[order, 0], data[order, 1]
    return custom_potential(grid, np.interp(grid.x, xs, vs, left=0.0, right=0.0))


@dataclass(frozen=True)
class PotentialReport:
    integrable: bool
    nonnegative: bool
    even: bool
    l1_norm: float
    min_value: float
    even_defect: float

    @property
    def passed(self) -> bool:
        return self.integrable and self.nonnegative and self.even


def check_potential(V: PotentialSpec) -> PotentialReport:
    v = V.samples
    l1 = float(V.grid.dx * np.sum(np.abs(v)))
    mirrored = v[(-np.arange(v.size)) % v.size]
    defect = float(np.max(np.abs(v - mirrored)))
    scale = max(1.0, float(np.max(np.abs(v))))
    return PotentialReport(
        integrable=bool(np.isfinite(l1)),
        nonnegative=bool(np.all(v >= 0)),
        even=defect <= 1e-12 * scale,
        l1_norm=l1,
        min_value=float(np.min(v)),
        even_defect=defect,
    )


@dataclass(frozen=True, eq=False)
class EquationSpec:
    """``kind`` is 'cubic', 'hartree' or 'dnls'; sign +1 is defocusing."""

    kind: str
    sign: int = 1
    potential: PotentialSpec | None = None

    def __post_init__(self):
        if self.kind not in ("cubic", "hartree", "dnls"):
            raise ValueError(f"unknown equation kind {self.kind!r}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.kind == "hartree" and self.potential is None:
            raise ValueError("Hartree equation needs a potential")
        if self.kind == "dnls" and self.sign != 1:
            raise ValueError("the gauged DNLS has no sign parameter")


def cubic_nls(sign: int = 1) -> EquationSpec:
    return EquationSpec("cubic", sign)


def hartree(V: PotentialSpec, sign: int = 1) -> EquationSpec:
    return EquationSpec("hartree", sign, V)


def gauged_dnls() -> EquationSpec:
    return EquationSpec("dnls", 1)


def convolve_density(V: PotentialSpec, u: np.ndarray) -> np.ndarray:
    grid = V.grid
    return np.real(inv(V.vhat_grid * fwd(np.abs(u) ** 2, grid), grid))


def nonlinear_term(spec: EquationSpec, u: np.ndarray, grid: Grid) -> np.ndarray:
    """Array version of ``nonlinearity`` used inside the time steppers."""
    if spec.kind == "cubic":
        return spec.sign * np.abs(u) ** 2 * u
    if spec.kind == "hartree":
        return spec.sign * convolve_density(spec.potential, u) * u
    ub = np.conj(u)
    ub_x = inv(1j * grid.xi * fwd(ub, grid), grid)
    return -1j * u * u * ub_x - 0.5 * np.abs(u) ** 4 * u


def nonlinearity(spec: EquationSpec, u: Field) -> Field:
    return Field(u.grid, nonlinear_term(spec, u.samples, u.grid))


def _phase_integral(f: Field) -> np.ndarray:
    return cumulative_trapezoid(np.abs(f.samples) ** 2, dx=f.grid.dx, initial=0.0)


def gauge_forward(f: Field) -> Field:
    """exp(-i int_{x_0}^{x} |f|^2) f, the left edge standing in for -inf."""
    return Field(f.grid, np.exp(-1j * _phase_integral(f)) * f.samples)


def gauge_inverse(g: Field) -> Field:
    return Field(g.grid, np.exp(1j * _phase_integral(g)) * g.samples)


@dataclass(frozen=True)
class SmallnessResult:
    l2_norm: float
    passed: bool

    @property
    def margin(self) -> float:
        return SMALLNESS_THRESHOLD - self.l2_norm


def smallness_check(phi: Field) -> SmallnessResult:
    n = l2_norm(phi)
    return SmallnessResult(n, n < SMALLNESS_THRESHOLD)
