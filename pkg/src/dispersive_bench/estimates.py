"""Monte-Carlo checks of space-time estimates on free Schroedinger waves.

Free evolution is u_hat(xi, t) = exp(-i xi^2 t) phi_hat(xi).  Mixed norms
are computed by quadrature: dx-weighted sums in space (periodic grid) and
the trapezoid rule in time.

Bilinear ratios are meant for the line, not the circle.  The two packets
are localized in space; the high-frequency one moves at group velocity at
least 2N while the low-frequency one spreads at speed at most N/4, so the
product is negligible once they have separated.  The product is therefore
integrated on [0, min(T_w, T_sep)] on a box large enough that neither
packet reaches the boundary before T_sep, so no wrap-around ever enters.
The M_t uniform time samples cover that window rather than all of [0, T_w].
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft
from scipy.integrate import trapezoid

from .errors import BandOutOfRange
from .seeding import child_rng
from .spectral import Field, Grid, fwd, inv

__all__ = [
    "EnsembleConfig", "RatioStats", "free_evolution", "free_evolution_series",
    "random_band_spectrum", "mixed_norm", "strichartz_ratio", "single_mode_ratio",
    "bilinear_norm", "bilinear_ratio", "corollary_ratio", "bilinear_grid",
    "KINDS", "COROLLARY_Q", "COROLLARY_WEIGHT", "write_ratio_csv",
]

# (q, r) of L^q_t L^r_x for each Strichartz kind
KINDS = {"L6": (6.0, 6.0), "L4": (4.0, 4.0), "L8L4": (8.0, 4.0)}
COROLLARY_Q = 2.25
COROLLARY_WEIGHT = 0.45


@dataclass(frozen=True)
class EnsembleConfig:
    trials: int = 64
    seed: int = 0
    T_w: float = 1.0
    M_t: int = 128
    # Strichartz ensembles: periodic grid and spectral band |xi| <= band
    L: float = 16 * np.pi
    M: int = 256
    band: float = 8.0
    # bilinear ensembles: bands in units of N
    f_band: tuple = (1.0, 2.0)
    g_band: tuple = (0.0, 0.125)
    bumps: int = 4

    def __post_init__(self):
        if self.trials < 10:
            raise ValueError("an ensemble needs at least 10 trials")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not self.T_w > 0 or self.M_t < 2:
            raise ValueError("time window and sample counts must be positive")
        if self.bumps < 1:
            raise ValueError("bumps must be positive")


@dataclass(frozen=True, eq=False)
class RatioStats:
    kind: str
    N: float
    trials: int
    max_ratio: float
    median_ratio: float
    T_w: float
    ratios: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def row(self) -> dict:
        return {"kind": self.kind, "N": self.N, "trials": self.trials,
                "max_ratio": self.max_ratio, "median_ratio": self.median_ratio, "T_w": self.T_w}


def _stats(kind, N, ratios, T_w):
    r = np.asarray(ratios, dtype=float)
    return RatioStats(kind, float(N), int(r.size), float(np.max(r)), float(np.median(r)), T_w, r)


def write_ratio_csv(stats) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "N", "trials", "max_ratio", "median_ratio", "T_w"])
    for s in stats:
        w.writerow([s.kind, repr(s.N), s.trials, repr(s.max_ratio), repr(s.median_ratio), repr(s.T_w)])
    return buf.getvalue()


def free_evolution(phi: Field, t: float) -> Field:
    g = phi.grid
    return Field(g, inv(np.exp(-1j * g.xi ** 2 * t) * fwd(phi.samples, g), g))


def free_phases(grid: Grid, times) -> np.ndarray:
    return np.exp(-1j * np.outer(np.asarray(times, dtype=float), grid.xi ** 2))


def free_evolution_series(phi_hat: np.ndarray, grid: Grid, times, phases=None) -> np.ndarray:
    """Samples u(x_j, t_m), shape (len(times), M), from a spectrum."""
    ph = free_phases(grid, times) if phases is None else phases
    return sfft.ifft(ph * (phi_hat * grid._phase), axis=1) / grid.dx


def _bump(u):
    """C-infinity bump supported on (-1, 1), equal to 1 at 0."""
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


def random_band_spectrum(grid: Grid, lo: float, hi: float, rng, bumps: int = 4) -> np.ndarray:
    """Random smooth spectrum supported in lo <= xi <= hi, unit L^2.

    A complex Gaussian mixture of ``bumps`` Gaussians spaced over the band,
    shaped by exp(-(xi/xi0)^2) with xi0 the band center, under a smooth
    bump taper vanishing at the band edges."""
    if not hi > lo:
        raise BandOutOfRange(f"empty band [{lo}, {hi}]")
    xi = grid.xi
    width = hi - lo
    centers = lo + width * (np.arange(bumps) + 0.5) / bumps
    coef = (rng.standard_normal(bumps) + 1j * rng.standard_normal(bumps)) / np.sqrt(2)
    sig = width / bumps
    Z = np.sum(coef[:, None] * np.exp(-((xi[None, :] - centers[:, None]) / sig) ** 2), axis=0)
    xi0 = 0.5 * (lo + hi)
    shape = np.exp(-(xi / xi0) ** 2) if xi0 != 0 else 1.0
    spec = Z * shape * _bump((xi - xi0) / (0.5 * width))
    nrm = np.sqrt(np.sum(np.abs(spec) ** 2) / grid.L)
    if nrm == 0:
        raise BandOutOfRange(f"band [{lo}, {hi}] contains no grid frequency")
    return spec / nrm


def mixed_norm(u: np.ndarray, dx: float, times, q: float, r: float) -> float:
    """|| u ||_{L^q_t L^r_x} with a dx-weighted sum in x and trapezoid in t."""
    inner = (dx * np.sum(np.abs(u) ** r, axis=1)) ** (q / r)
    return float(trapezoid(inner, times) ** (1.0 / q))


def single_mode_ratio(kind: str, L: float, T_w: float) -> float:
    """Closed form for a unit-norm single Fourier mode: |u| = L^{-1/2}."""
    q, r = KINDS[kind]
    return T_w ** (1.0 / q) * L ** (1.0 / r - 0.5)


def _strichartz_one(phi_hat, grid, kind, T_w, M_t):
    nrm = np.sqrt(np.sum(np.abs(phi_hat) ** 2) / grid.L)
    if nrm == 0:
        return 0.0
    q, r = KINDS[kind]
    t = np.linspace(0.0, T_w, M_t)
    u = free_evolution_series(phi_hat, grid, t)
    return mixed_norm(u, grid.dx, t, q, r) / nrm


def strichartz_ratio(kind: str, cfg: EnsembleConfig, phi_hat: np.ndarray | None = None) -> RatioStats:
    """max / median of ||e^{it Lap} phi||_{L^q_t L^r_x([0,T_w])} / ||phi||_{L^2}
    over random unit-norm phi with |xi| <= cfg.band.  A fixed ``phi_hat``
    replaces the random draws (one trial)."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {sorted(KINDS)}")
    grid = Grid(cfg.L, cfg.M)
    if cfg.band >= grid.nyquist:
        raise BandOutOfRange(f"band {cfg.band} reaches the Nyquist frequency {grid.nyquist:.4g}")
    if phi_hat is not None:
        return _stats(kind, cfg.band, [_strichartz_one(phi_hat, grid, kind, cfg.T_w, cfg.M_t)], cfg.T_w)
    ratios = []
    for i in range(cfg.trials):
        rng = child_rng(cfg.seed, i)
        ph = random_band_spectrum(grid, -cfg.band, cfg.band, rng, cfg.bumps)
        ratios.append(_strichartz_one(ph, grid, kind, cfg.T_w, cfg.M_t))
    return _stats(kind, cfg.band, ratios, cfg.T_w)


# bilinear estimates

def _packet_radius(bandwidth: float, bumps: int) -> float:
    # a bump mixture of spectral scale w/bumps is negligible beyond this
    return 6.0 * np.pi * bumps / bandwidth


def bilinear_grid(N: float, cfg: EnsembleConfig):
    """Box, time window and samples for the separated-band product at N."""
    flo, fhi = cfg.f_band[0] * N, cfg.f_band[1] * N
    glo, ghi = cfg.g_band[0] * N, cfg.g_band[1] * N
    if not (0 <= glo < ghi < flo < fhi):
        raise BandOutOfRange(f"bands f=[{flo}, {fhi}], g=[{glo}, {ghi}] must be ordered and disjoint")
    Rf = _packet_radius(fhi - flo, cfg.bumps)
    Rg = _packet_radius(ghi - glo, cfg.bumps)
    # slowest f group velocity minus fastest g spreading speed
    rel = 2.0 * flo - 2.0 * max(abs(glo), abs(ghi))
    T_sep = min(cfg.T_w, 2.0 * (Rf + Rg) / rel)
    half = 2.0 * fhi * T_sep + 2.0 * (Rf + Rg)
    dx = np.pi / (2.0 * fhi)
    M = int(2 ** np.ceil(np.log2(2 * half / dx)))
    return Grid(M * dx, M), T_sep


def bilinear_norm(f_hat, g_hat, grid: Grid, times, q: float = 2.0, phases=None) -> float:
    """|| (e^{it Lap} f)(e^{it Lap} g) ||_{L^q_t L^2_x} over the given times."""
    times = np.asarray(times, dtype=float)
    inner = np.empty(len(times))
    for start in range(0, len(times), 128):
        sl = slice(start, start + 128)
        ph = free_phases(grid, times[sl]) if phases is None else phases[sl]
        fu = free_evolution_series(f_hat, grid, None, ph)
        gu = free_evolution_series(g_hat, grid, None, ph)
        inner[sl] = grid.dx * np.sum(np.abs(fu * gu) ** 2, axis=1)
    return float(trapezoid(inner ** (q / 2.0), times) ** (1.0 / q))


def _bilinear_trials(N, cfg, q, weight, kind):
    grid, T_sep = bilinear_grid(N, cfg)
    if cfg.f_band[1] * N >= grid.nyquist:
        raise BandOutOfRange(f"f band top {cfg.f_band[1] * N} exceeds Nyquist {grid.nyquist:.4g}")
    t = np.linspace(0.0, T_sep, cfg.M_t)
    phases = free_phases(grid, t) if cfg.M_t <= 512 else None
    ratios = []
    for i in range(cfg.trials):
        rng = child_rng(cfg.seed, i)
        fh = random_band_spectrum(grid, cfg.f_band[0] * N, cfg.f_band[1] * N, rng, cfg.bumps)
        gh = random_band_spectrum(grid, cfg.g_band[0] * N, cfg.g_band[1] * N, rng, cfg.bumps)
        ratios.append(N ** weight * bilinear_norm(fh, gh, grid, t, q, phases))
    return _stats(kind, N, ratios, cfg.T_w)


def bilinear_ratio(N: float, cfg: EnsembleConfig) -> RatioStats:
    """R = N^{1/2} ||f g||_{L^2([0,T_w] x R)} for unit-norm random packets in
    the bands f_band * N and g_band * N."""
    return _bilinear_trials(N, cfg, 2.0, 0.5, "bilinear")


def corollary_ratio(N: float, cfg: EnsembleConfig) -> RatioStats:
    """As ``bilinear_ratio`` with L^{2.25}_t L^2_x and weight N^{0.45}."""
    return _bilinear_trials(N, cfg, COROLLARY_Q, COROLLARY_WEIGHT, "corollary")
