"""Sampled checks of the pointwise multiplier bounds.

Each bound is reported as the empirical ratio |quantity| / bound expression
over stratified random samples; the implicit constants are measured, never
assumed.  Dyadic levels are N_j = max(1, 2^floor(log2 |xi_j|)) and the
starred levels are their decreasing rearrangement.  Two largest levels are
"separated" when N_2* >= 4 N_3*, otherwise "comparable".
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .multipliers import M4Dnls, PsiHartree, ThetaProfile
from .seeding import child_rng

__all__ = [
    "SamplerConfig", "BoundRow", "BoundReport", "verify_pointwise_bounds",
    "dyadic_level", "starred_levels", "SEPARATION", "BOUND_IDS",
]

SEPARATION = 4.0
BOUND_IDS = ("psi_separated", "psi_comparable", "psi_resonant", "lemma43",
             "double_mvt", "m4_dnls", "m4_dnls_resonant")
CSV_COLUMNS = ("bound_id", "regime", "samples", "max_ratio", "p99_ratio", "N", "s")


@dataclass(frozen=True)
class SamplerConfig:
    samples: int = 100_000
    seed: int = 0
    batch: int = 1 << 15
    top: float = 64.0  # largest frequency drawn, in units of N

    def __post_init__(self):
        if self.samples < 10_000:
            raise ValueError("bound sampling needs at least 1e4 samples")
        if self.batch < 1:
            raise ValueError("batch must be positive")


@dataclass(frozen=True)
class BoundRow:
    bound_id: str
    regime: str
    samples: int
    max_ratio: float
    p99_ratio: float
    N: float
    s: float


@dataclass
class BoundReport:
    rows: list = field(default_factory=list)

    def get(self, bound_id: str, regime: str = "all") -> BoundRow:
        for r in self.rows:
            if r.bound_id == bound_id and r.regime == regime:
                return r
        raise KeyError((bound_id, regime))

    @property
    def all_finite(self) -> bool:
        return all(np.isfinite(r.max_ratio) and np.isfinite(r.p99_ratio) for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.bound_id, r.regime, r.samples, repr(r.max_ratio),
                        repr(r.p99_ratio), repr(float(r.N)), repr(float(r.s))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "BoundReport":
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            rows.append(BoundRow(rec["bound_id"], rec["regime"], int(rec["samples"]),
                                 float(rec["max_ratio"]), float(rec["p99_ratio"]),
                                 float(rec["N"]), float(rec["s"])))
        return cls(rows)


def dyadic_level(xi):
    a = np.abs(np.asarray(xi, dtype=float))
    out = np.ones_like(a)
    big = a >= 1.0
    out[big] = 2.0 ** np.floor(np.log2(a[big]))
    return out


def starred_levels(*xis):
    """Decreasingly sorted dyadic levels, shape (n, samples)."""
    lv = np.stack([dyadic_level(x) for x in xis])
    return -np.sort(-lv, axis=0)


def _loguni(rng, lo, hi, n):
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (n,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (n,))
    a, b = np.minimum(lo, hi), np.maximum(lo, hi)
    return np.exp(rng.uniform(np.log(a), np.log(b)))


def _signs(rng, n):
    return rng.choice([-1.0, 1.0], size=n)


def _gamma4(rng, n, N, top):
    """Half generic draws, half with two large and two small frequencies,
    slots randomly permuted; every sample lies exactly on Gamma_4."""
    h = n // 2
    free = np.empty((3, n))
    free[:, :h] = _signs(rng, (3, h)) * _loguni(rng, 0.5, top * N, 3 * h).reshape(3, h)
    big = _signs(rng, n - h) * _loguni(rng, N / 2, top * N, n - h)
    free[0, h:] = big
    free[1:, h:] = (_signs(rng, (2, n - h))
                    * _loguni(rng, 0.5, np.tile(np.abs(big) / 16, 2), 2 * (n - h)).reshape(2, n - h))
    xi = np.concatenate([free, -np.sum(free, axis=0, keepdims=True)])
    perm = np.argsort(rng.random((4, n)), axis=0)
    return np.take_along_axis(xi, perm, axis=0)


def _resonant4(rng, n, N, top):
    a = _signs(rng, n) * _loguni(rng, 0.5, top * N, n)
    b = _signs(rng, n) * _loguni(rng, 0.5, top * N, n)
    first = rng.random(n) < 0.5
    # branch xi_2 = -xi_1 or branch xi_4 = -xi_1
    x2 = np.where(first, -a, -b)
    x3 = b
    x4 = np.where(first, -b, -a)
    return np.stack([a, x2, x3, x4])


def _ratio(num, den):
    num = np.abs(num)
    out = np.zeros_like(num)
    nz = num != 0
    out[nz] = num[nz] / den[nz]
    return out


def _batches(cfg: SamplerConfig, stream: int):
    done, i = 0, 0
    while done < cfg.samples:
        n = min(cfg.batch, cfg.samples - done)
        yield child_rng(cfg.seed, stream * 1_000_003 + i), n
        done += n
        i += 1


def _summary(bound_id, regime, ratios, N, s):
    r = np.concatenate(ratios) if ratios else np.zeros(0)
    if r.size == 0:
        return BoundRow(bound_id, regime, 0, 0.0, 0.0, N, s)
    return BoundRow(bound_id, regime, int(r.size), float(np.max(r)),
                    float(np.quantile(r, 0.99)), N, s)


def _psi_bounds(p, cfg):
    psi = PsiHartree(p, c=1.0)
    sep, comp = [], []
    for rng, n in _batches(cfg, 1):
        x = _gamma4(rng, n, p.N, cfg.top)
        val = psi(*x)
        st = starred_levels(*x)
        t1, t2 = p(st[0]), p(st[1])
        is_sep = st[1] >= SEPARATION * st[2]
        b1 = t1 * t2 / st[0] ** 2
        b2 = t1 * t2 * st[2] * st[3] / st[0] ** 3
        sep.append(_ratio(val[is_sep], b1[is_sep]))
        comp.append(_ratio(val[~is_sep], b2[~is_sep]))
    res = []
    for rng, n in _batches(cfg, 2):
        res.append(np.abs(psi(*_resonant4(rng, n, p.N, cfg.top))))
    return [_summary("psi_separated", "separated", sep, p.N, p.s),
            _summary("psi_comparable", "comparable", comp, p.N, p.s),
            _summary("psi_resonant", "resonant", res, p.N, p.s)]


LEMMA43_CASES = {
    1: "N<=|y|,2N<=|x|",
    2: "N<=|y|<=|x|<=2N",
    3: "|y|<=|x|<=N",
    4: "|y|<=N,2N<=|x|",
    5: "|y|<=N<=|x|<=2N",
}


def _lemma43_draw(rng, n, N, top, case):
    if case == 1:
        x = _loguni(rng, 2 * N, top * N, n)
        y = rng.uniform(N, x)
    elif case == 2:
        x = rng.uniform(N, 2 * N, n)
        y = rng.uniform(N, x)
    elif case == 3:
        x = rng.uniform(0, N, n)
        y = rng.uniform(0, x)
    elif case == 4:
        x = _loguni(rng, 2 * N, top * N, n)
        y = rng.uniform(0, N, n)
    else:
        x = rng.uniform(N, 2 * N, n)
        y = rng.uniform(0, N, n)
    return _signs(rng, n) * x, _signs(rng, n) * y


def _lemma43(p, cfg):
    rows = []
    for case, label in LEMMA43_CASES.items():
        out = []
        for rng, n in _batches(cfg, 10 + case):
            x, y = _lemma43_draw(rng, max(n // 5, 1), p.N, cfg.top, case)
            ax, ay = np.abs(x), np.abs(y)
            lhs = p(x) ** 2 - p(y) ** 2
            rhs = (ax - ay) * p(x) ** 2 / ax
            out.append(_ratio(lhs, rhs))
        rows.append(_summary("lemma43", f"case{case}:{label}", out, p.N, p.s))
    return rows


def _double_mvt(p, cfg):
    out = []
    f = lambda z: p(z) ** 2
    for rng, n in _batches(cfg, 20):
        x = _signs(rng, n) * _loguni(rng, 3 * p.N, cfg.top * p.N, n)
        eta = rng.uniform(-1, 1, n) * np.abs(x) / 8
        mu = rng.uniform(-1, 1, n) * np.abs(x) / 8
        lhs = f(x + eta + mu) - f(x + eta) - f(x + mu) + f(x)
        f2 = 2 * (p.derivative(x, 1) ** 2 + p(x) * p.derivative(x, 2))
        out.append(_ratio(lhs, np.abs(eta * mu * f2)))
    return [_summary("double_mvt", "|eta|,|mu|<=|x|/8", out, p.N, p.s)]


def _m4_dnls(p, cfg):
    m = M4Dnls(p)
    gen, res = [], []
    for rng, n in _batches(cfg, 30):
        x = _gamma4(rng, n, p.N, cfg.top)
        st = starred_levels(*x)
        gen.append(_ratio(m(*x), p(st[0]) * p(st[1]) / st[0]))
    for rng, n in _batches(cfg, 31):
        res.append(np.abs(m(*_resonant4(rng, n, p.N, cfg.top))))
    return [_summary("m4_dnls", "all", gen, p.N, p.s),
            _summary("m4_dnls_resonant", "resonant", res, p.N, p.s)]


def verify_pointwise_bounds(p: ThetaProfile, cfg: SamplerConfig | None = None,
                            bounds=BOUND_IDS) -> BoundReport:
    cfg = cfg or SamplerConfig()
    rows = []
    if any(b.startswith("psi") for b in bounds):
        rows += [r for r in _psi_bounds(p, cfg) if r.bound_id in bounds]
    if "lemma43" in bounds:
        rows += _lemma43(p, cfg)
    if "double_mvt" in bounds:
        rows += _double_mvt(p, cfg)
    if any(b.startswith("m4_dnls") for b in bounds):
        rows += [r for r in _m4_dnls(p, cfg) if r.bound_id in bounds]
    return BoundReport(rows)
