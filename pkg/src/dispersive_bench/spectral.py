"""Grid, continuum-normalized Fourier transforms, Sobolev norms and
single-function Fourier multipliers on a periodized line.

The transform approximates the line integral

    u_hat(xi) = int u(x) exp(-i x xi) dx

by the dx-weighted sum over x_j = -L/2 + j dx.  Coefficient arrays are
kept in numpy FFT order; ``Grid.xi`` gives the matching frequencies, with
the unpaired Nyquist mode sitting at -pi M / L.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .errors import InvalidField, InvalidSpectrum

__all__ = [
    "Grid", "Field", "Spectrum",
    "JapaneseBracketPow", "HomogeneousPow", "HighPassQ", "DyadicShell",
    "forward_transform", "inverse_transform", "apply_multiplier",
    "sobolev_norm", "l2_norm", "dyadic_component", "dyadic_levels",
    "spectral_derivative", "dealias_mask", "field_from_function",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid of ``M`` points on [-L/2, L/2)."""

    L: float
    M: int

    def __post_init__(self):
        if not (np.isfinite(self.L) and self.L > 0):
            raise ValueError(f"grid length must be positive, got {self.L}")
        if int(self.M) != self.M or self.M < 2 or self.M % 2:
            raise ValueError(f"mode count must be a positive even integer, got {self.M}")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "L", float(self.L))

    @property
    def dx(self) -> float:
        return self.L / self.M

    @cached_property
    def x(self) -> np.ndarray:
        x = -0.5 * self.L + self.dx * np.arange(self.M)
        x.setflags(write=False)
        return x

    @cached_property
    def k(self) -> np.ndarray:
        """Integer mode indices in FFT order, in [-M/2, M/2)."""
        k = np.fft.fftfreq(self.M, d=1.0 / self.M).astype(np.int64)
        k.setflags(write=False)
        return k

    @cached_property
    def xi(self) -> np.ndarray:
        xi = (2.0 * np.pi / self.L) * self.k
        xi.setflags(write=False)
        return xi

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / self.L

    @property
    def nyquist(self) -> float:
        return np.pi * self.M / self.L

    @cached_property
    def _phase(self) -> np.ndarray:
        # exp(-i x_0 xi_k) with x_0 = -L/2 reduces to (-1)^k
        ph = np.where(self.k % 2 == 0, 1.0, -1.0)
        ph.setflags(write=False)
        return ph


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Field:
    """Complex samples u(x_j) on a grid."""

    grid: Grid
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.shape != (self.grid.M,):
            raise InvalidField(f"expected {self.grid.M} samples, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise InvalidField("field contains non-finite samples")
        object.__setattr__(self, "samples", _frozen(s))

    def __add__(self, other: "Field") -> "Field":
        return Field(self.grid, self.samples + other.samples)

    def __sub__(self, other: "Field") -> "Field":
        return Field(self.grid, self.samples - other.samples)

    def __mul__(self, c) -> "Field":
        return Field(self.grid, c * self.samples)

    __rmul__ = __mul__

    def conj(self) -> "Field":
        return Field(self.grid, np.conj(self.samples))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Continuum-normalized Fourier coefficients, FFT order."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.shape != (self.grid.M,):
            raise InvalidSpectrum(f"expected {self.grid.M} coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidSpectrum("spectrum contains non-finite coefficients")
        object.__setattr__(self, "coeffs", _frozen(c))


def field_from_function(grid: Grid, fn) -> Field:
    return Field(grid, np.asarray(fn(grid.x), dtype=np.complex128))


# raw array transforms, shared with the time steppers

def fwd(samples: np.ndarray, grid: Grid) -> np.ndarray:
    return grid.dx * grid._phase * sfft.fft(samples)


def inv(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    return sfft.ifft(coeffs * grid._phase) / grid.dx


def forward_transform(f: Field) -> Spectrum:
    return Spectrum(f.grid, fwd(f.samples, f.grid))


def inverse_transform(F: Spectrum) -> Field:
    return Field(F.grid, inv(F.coeffs, F.grid))


# multiplier profiles

@dataclass(frozen=True)
class JapaneseBracketPow:
    """<xi>^s, the symbol of D^s."""

    s: float

    def __call__(self, xi):
        return (1.0 + np.square(xi)) ** (0.5 * self.s)


@dataclass(frozen=True)
class HomogeneousPow:
    """|xi|^s; at xi = 0 the value is 0 for s > 0 and 1 for s = 0."""

    s: float

    def __call__(self, xi):
        a = np.abs(np.asarray(xi, dtype=float))
        if self.s == 0:
            return np.ones_like(a)
        return a ** self.s


@dataclass(frozen=True)
class HighPassQ:
    """Sharp indicator of |xi| >= N."""

    N: float

    def __call__(self, xi):
        return (np.abs(xi) >= self.N).astype(float)


@dataclass(frozen=True)
class DyadicShell:
    """Indicator of N <= |xi| < 2N; ``N = 0`` selects the block |xi| < 1."""

    N: int

    def __post_init__(self):
        n = int(self.N)
        if n != self.N or n < 0 or (n > 0 and n & (n - 1)):
            raise ValueError(f"dyadic level must be 0 or a power of two, got {self.N}")

    def __call__(self, xi):
        a = np.abs(xi)
        if self.N == 0:
            return (a < 1.0).astype(float)
        return ((a >= self.N) & (a < 2 * self.N)).astype(float)


def apply_multiplier(f: Field, m) -> Field:
    w = np.asarray(m(f.grid.xi), dtype=float)
    return Field(f.grid, inv(w * fwd(f.samples, f.grid), f.grid))


def sobolev_norm(f: Field, s: float) -> float:
    c = fwd(f.samples, f.grid)
    w = (1.0 + f.grid.xi ** 2) ** s
    return float(np.sqrt(np.sum(w * np.abs(c) ** 2) / f.grid.L))


def l2_norm(f: Field) -> float:
    """Direct quadrature L2 norm, independent of the transform."""
    return float(np.sqrt(f.grid.dx * np.sum(np.abs(f.samples) ** 2)))


def dyadic_levels(grid: Grid) -> list[int]:
    """Shell labels 0, 1, 2, 4, ... covering every grid frequency."""
    top = float(np.max(np.abs(grid.xi)))
    levels = [0]
    n = 1
    while n <= top:
        levels.append(n)
        n *= 2
    return levels


def dyadic_component(f: Field, N_dyadic: int) -> Field:
    return apply_multiplier(f, DyadicShell(N_dyadic))


def spectral_derivative(f: Field, order: int = 1) -> Field:
    """d^order f / dx^order; the Nyquist mode is dropped for odd orders."""
    xi = f.grid.xi
    sym = (1j * xi) ** order
    if order % 2:
        sym = np.where(f.grid.k == -f.grid.M // 2, 0.0, sym)
    return Field(f.grid, inv(sym * fwd(f.samples, f.grid), f.grid))


def dealias_mask(grid: Grid, fraction: float) -> np.ndarray:
    """Keep |k| <= fraction * M/2, always dropping the Nyquist mode."""
    if not 0 < fraction <= 1:
        raise ValueError(f"dealias fraction must lie in (0, 1], got {fraction}")
    k = grid.k
    keep = (np.abs(k) <= fraction * grid.M / 2) & (k != -grid.M // 2)
    return keep.astype(float)
