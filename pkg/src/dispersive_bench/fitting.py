"""Log-log least-squares fits for empirical exponents."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySeries, TooFewPoints

__all__ = ["FitResult", "fit_loglog", "fit_growth_envelope", "MIN_POINTS"]

MIN_POINTS = 3


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual_rms: float
    points_used: int
    degenerate: bool = False
    note: str = ""

    def as_row(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "residual_rms": self.residual_rms, "points_used": self.points_used,
                "degenerate": int(self.degenerate), "note": self.note}


def fit_loglog(x, y, *, min_points: int = MIN_POINTS) -> FitResult:
    """Fit log y = slope * log x + intercept over the strictly positive points.

    When every y is zero the fit is reported as degenerate with slope 0
    instead of raising; fewer than ``min_points`` usable points (but some
    nonzero data) raises TooFewPoints."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("x and y must have the same shape")
    if x.size < min_points:
        raise TooFewPoints(f"need at least {min_points} points, got {x.size}")
    if np.all(y == 0):
        return FitResult(0.0, float("-inf"), 0.0, 0, True, "all values are zero")
    ok = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    if ok.sum() < min_points:
        raise TooFewPoints(f"only {int(ok.sum())} strictly positive points")
    lx, ly = np.log(x[ok]), np.log(y[ok])
    A = np.vstack([lx, np.ones_like(lx)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + icpt)
    note = "" if ok.all() else f"dropped {int((~ok).sum())} non-positive points"
    return FitResult(float(slope), float(icpt), float(np.sqrt(np.mean(resid ** 2))),
                     int(ok.sum()), False, note)


def fit_growth_envelope(t, norms) -> FitResult:
    """Slope of the running maximum of ``norms`` against (1 + t), log-log."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(norms, dtype=float)
    if t.size == 0 or y.size == 0:
        raise EmptySeries("growth envelope needs a non-empty series")
    if t.shape != y.shape:
        raise ValueError("t and norms must have the same shape")
    keep = t > 0
    if not keep.any():
        raise EmptySeries("no samples with t > 0")
    env = np.maximum.accumulate(y)[keep]
    return fit_loglog(1.0 + t[keep], env)
