"""Exact differential polynomials in u, conj(u) and the conserved-density
ladder of the cubic NLS, plus numeric evaluation of conserved quantities.

The ladder is generated division-free: with P_k = conj(u) q_k,

    q_1 = u,
    q_{k+1} = -i d/dx q_k + kappa conj(u) sum_{l=1}^{k-1} q_l q_{k-l}.

For  i u_t + u_xx = sign |u|^2 u  the densities P_k integrate to conserved
quantities when kappa = sign / 2 (``coupling_for_sign``); kappa = 1 is the
textbook normalization for a nonlinearity 2|u|^2 u.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .equations import EquationSpec, convolve_density
from .errors import KMaxTooLarge
from .spectral import Field, fwd, inv

__all__ = [
    "GaussRational", "DiffPolynomial", "build_q_ladder", "build_p_ladder",
    "coupling_for_sign", "eval_conserved", "ConservedReport",
    "classical_invariants", "conserved_series", "U", "UBAR", "K_MAX",
]

U, UBAR = 0, 1
K_MAX = 9


@dataclass(frozen=True)
class GaussRational:
    """Exact a + b i with rational a, b."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, z) -> "GaussRational":
        if isinstance(z, GaussRational):
            return z
        if isinstance(z, complex):
            return cls(Fraction(z.real), Fraction(z.imag))
        return cls(Fraction(z), Fraction(0))

    def __add__(self, o):
        o = GaussRational.of(o)
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-GaussRational.of(o))

    def __mul__(self, o):
        o = GaussRational.of(o)
        return GaussRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        return f"({self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}i)"


I = GaussRational(Fraction(0), Fraction(1))

Factor = tuple  # (field, derivative order)


def _factor_str(f):
    name = "u" if f[0] == U else "ub"
    return name if f[1] == 0 else f"{name}_{'x' * f[1]}"


@dataclass(frozen=True, eq=False)
class DiffPolynomial:
    """Sum of coefficient * product of factors (field, order).

    Monomials are keyed by their sorted factor tuple; zero terms are dropped
    so equal polynomials have equal ``terms``."""

    terms: dict = field(default_factory=dict)

    @classmethod
    def _make(cls, items: Iterable) -> "DiffPolynomial":
        acc: dict = {}
        for key, c in items:
            key = tuple(sorted(key))
            acc[key] = acc.get(key, GaussRational()) + c
        return cls({k: v for k, v in acc.items() if v})

    @classmethod
    def u(cls, order: int = 0) -> "DiffPolynomial":
        return cls({((U, order),): GaussRational(Fraction(1))})

    @classmethod
    def ubar(cls, order: int = 0) -> "DiffPolynomial":
        return cls({((UBAR, order),): GaussRational(Fraction(1))})

    @classmethod
    def zero(cls) -> "DiffPolynomial":
        return cls({})

    def __eq__(self, other):
        return isinstance(other, DiffPolynomial) and self.terms == other.terms

    def __add__(self, other: "DiffPolynomial") -> "DiffPolynomial":
        return DiffPolynomial._make(list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self):
        return DiffPolynomial({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "DiffPolynomial":
        if not isinstance(other, DiffPolynomial):
            c = GaussRational.of(other)
            return DiffPolynomial._make((k, v * c) for k, v in self.terms.items())
        return DiffPolynomial._make(
            (k1 + k2, c1 * c2)
            for k1, c1 in self.terms.items() for k2, c2 in other.terms.items())

    __rmul__ = __mul__

    def dx(self) -> "DiffPolynomial":
        """x-derivative by the Leibniz rule."""
        out = []
        for key, c in self.terms.items():
            for i, (fld, order) in enumerate(key):
                out.append((key[:i] + ((fld, order + 1),) + key[i + 1:], c))
        return DiffPolynomial._make(out)

    @property
    def max_order(self) -> int:
        return max((o for key in self.terms for _, o in key), default=0)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = [f"{c!r}*{'*'.join(_factor_str(f) for f in key)}"
                 for key, c in sorted(self.terms.items())]
        return " + ".join(parts)


def coupling_for_sign(sign: int) -> Fraction:
    return Fraction(sign, 2)


def build_q_ladder(k_max: int, coupling=Fraction(1, 2)) -> list[DiffPolynomial]:
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    if k_max > K_MAX:
        raise KMaxTooLarge(f"k_max={k_max} exceeds {K_MAX}")
    kappa = GaussRational.of(Fraction(coupling))
    ub = DiffPolynomial.ubar()
    q = [DiffPolynomial.u()]
    for k in range(1, k_max):
        nxt = q[k - 1].dx() * (-I)
        conv = DiffPolynomial.zero()
        for l in range(1, k):
            conv = conv + q[l - 1] * q[k - l - 1]
        if conv.terms:
            nxt = nxt + (ub * conv) * kappa
        q.append(nxt)
    return q


def build_p_ladder(k_max: int, coupling=Fraction(1, 2)) -> list[DiffPolynomial]:
    ub = DiffPolynomial.ubar()
    return [ub * q for q in build_q_ladder(k_max, coupling)]


def _derivative_stack(u: Field, order: int):
    grid = u.grid
    uh = fwd(u.samples, grid)
    vh = fwd(np.conj(u.samples), grid)
    sym = 1j * np.where(grid.k == -grid.M // 2, 0.0, grid.xi)
    out = {(U, 0): u.samples, (UBAR, 0): np.conj(u.samples)}
    for n in range(1, order + 1):
        out[(U, n)] = inv(sym ** n * uh, grid)
        out[(UBAR, n)] = inv(sym ** n * vh, grid)
    return out


def eval_conserved(P: DiffPolynomial, u: Field) -> complex:
    """dx-weighted sum of the density P evaluated with spectral derivatives."""
    ders = _derivative_stack(u, P.max_order)
    total = np.zeros(u.grid.M, dtype=complex)
    for key, c in P.terms.items():
        prod = np.full(u.grid.M, complex(c))
        for f in key:
            prod = prod * ders[f]
        total += prod
    return complex(u.grid.dx * np.sum(total))


@dataclass(frozen=True, eq=False)
class ConservedReport:
    name: str
    values: np.ndarray
    times: np.ndarray | None = None
    floor: float = 1e-12

    @property
    def value(self) -> complex:
        return complex(self.values[0])

    @property
    def drift(self) -> float:
        v = np.asarray(self.values)
        return float(np.max(np.abs(v - v[0])) / max(abs(v[0]), self.floor))


def _ux(u: Field) -> np.ndarray:
    grid = u.grid
    sym = 1j * np.where(grid.k == -grid.M // 2, 0.0, grid.xi)
    return inv(sym * fwd(u.samples, grid), grid)


def classical_invariants(spec: EquationSpec, u: Field) -> dict[str, float]:
    """Mass, momentum and the variant's energy for a single field."""
    dx = u.grid.dx
    a = u.samples
    ux = _ux(u)
    dens = np.abs(a) ** 2
    out = {"mass": float(dx * np.sum(dens))}
    if spec.kind in ("cubic", "hartree"):
        out["momentum"] = float(dx * np.sum(np.imag(np.conj(a) * ux)))
        kinetic = 0.5 * dx * np.sum(np.abs(ux) ** 2)
        if spec.kind == "cubic":
            pot = 0.25 * dx * np.sum(dens ** 2)
        else:
            pot = 0.25 * dx * np.sum(convolve_density(spec.potential, a) * dens)
        out["energy"] = float(kinetic + spec.sign * pot)
    else:
        out["energy"] = float(dx * np.sum(np.abs(ux) ** 2)
                              - 0.5 * dx * np.sum(np.imag(dens * a * np.conj(ux))))
    return out


def conserved_series(fields, times, spec: EquationSpec | None = None,
                     k_max: int = 0, coupling=None) -> list[ConservedReport]:
    """Conserved-quantity reports along a sequence of fields."""
    times = np.asarray(times, dtype=float)
    reports = []
    if spec is not None:
        rows = [classical_invariants(spec, f) for f in fields]
        for name in rows[0]:
            reports.append(ConservedReport(name, np.array([r[name] for r in rows]), times))
    if k_max:
        if coupling is None:
            coupling = coupling_for_sign(spec.sign if spec is not None else 1)
        for k, P in enumerate(build_p_ladder(k_max, coupling), start=1):
            reports.append(ConservedReport(
                f"P{k}", np.array([eval_conserved(P, f) for f in fields]), times))
    return reports
