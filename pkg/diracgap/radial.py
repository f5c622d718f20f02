# Filename: diracgap/radial.py
"""Radial functions built from c * r^k * exp(-a r^2) terms, their closed-form integrals and
the reduced operators D- = d/dr - 1/r and D+ = -d/dr - 1/r of the kappa = -1 channel.

A term may carry a balance weight (the atomic-balance factor (2 - V)^-1); such terms are
integrated by adaptive quadrature, everything else in closed form through `moment`.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Literal, Union

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .errors import AccuracyError, DomainError, IntegrabilityError, UnsupportedOperationError
from .models import PotentialSpec
from .utils import ensure_exponent, ensure_positive

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)

_quadrature = {"rtol": 1e-12}

Weight = Union[Literal["one", "inv_r"], PotentialSpec]


def log_moment(n, c):
    """log of the integral of r^n exp(-c r^2) over (0, inf); vectorized."""
    n = np.asarray(n, dtype=float)
    c = np.asarray(c, dtype=float)
    return gammaln((n + 1.0) / 2.0) - LN2 - (n + 1.0) / 2.0 * np.log(c)


def set_quadrature_rtol(rtol: float) -> float:
    """Default relative tolerance of the adaptive quadrature path (solver.quad_rtol); returns the old one."""
    ensure_positive(rtol, "solver.quad_rtol")
    previous = _quadrature["rtol"]
    _quadrature["rtol"] = float(rtol)
    return previous


def quadrature_rtol() -> float:
    return _quadrature["rtol"]


def moment(n: int, c: float) -> float:
    """Gamma((n+1)/2) / (2 c^((n+1)/2))."""
    if n < 0:
        raise DomainError(f"moment order must be >= 0, got {n}")
    ensure_positive(c, "c")
    return float(np.exp(log_moment(n, c)))


@dataclass(frozen=True)
class RationalWeight:
    """Multiplicative balance factor of a term.

    coulomb: 1 / (2r + alpha_z)   (the term's power already carries the extra r)
    well:    1 / (2 - depth * exp(-r^2 / width^2))
    """

    kind: Literal["coulomb", "well"]
    alpha_z: float = 0.0
    depth: float = 0.0
    width: float = 1.0

    def factor(self, r: float) -> float:
        if self.kind == "coulomb":
            return 1.0 / (2.0 * r + self.alpha_z)
        return 1.0 / (2.0 - self.depth * math.exp(-(r * r) / (self.width * self.width)))

    def factor_array(self, r: np.ndarray) -> np.ndarray:
        if self.kind == "coulomb":
            return 1.0 / (2.0 * r + self.alpha_z)
        return 1.0 / (2.0 - self.depth * np.exp(-(r**2) / self.width**2))

    @property
    def knee(self) -> float:
        return self.alpha_z / 2.0 if self.kind == "coulomb" else self.width

    @property
    def singular_power(self) -> int:
        # 1/(2r) behaves like r^-1 at the origin when there is no nuclear charge
        return 1 if self.kind == "coulomb" and self.alpha_z == 0.0 else 0


@dataclass(frozen=True)
class RadialTerm:
    coeff: float
    power: int
    exponent: float
    weight: RationalWeight | None = None

    def __post_init__(self):
        if self.power < 0:
            raise DomainError(f"term power must be >= 0, got {self.power}")
        if not math.isfinite(self.coeff):
            raise DomainError(f"term coefficient is not finite: {self.coeff!r}")
        ensure_exponent(self.exponent)

    @property
    def rational_weight(self) -> bool:
        return self.weight is not None

    @property
    def key(self) -> tuple:
        return self.power, self.exponent, self.weight


@dataclass(frozen=True)
class RadialFunction:
    terms: tuple[RadialTerm, ...] = field(default_factory=tuple)

    @classmethod
    def gaussian(cls, power: int, exponent: float, coeff: float = 1.0) -> "RadialFunction":
        return cls((RadialTerm(coeff, power, exponent),))

    @classmethod
    def zero(cls) -> "RadialFunction":
        return cls(())

    @classmethod
    def from_terms(cls, terms) -> "RadialFunction":
        return cls(tuple(terms)).simplified()

    def simplified(self) -> "RadialFunction":
        merged: dict[tuple, float] = {}
        for t in self.terms:
            merged[t.key] = merged.get(t.key, 0.0) + t.coeff
        return RadialFunction(
            tuple(RadialTerm(c, k, a, w) for (k, a, w), c in merged.items() if c != 0.0)
        )

    def __add__(self, other: "RadialFunction") -> "RadialFunction":
        return RadialFunction(self.terms + other.terms).simplified()

    def __sub__(self, other: "RadialFunction") -> "RadialFunction":
        return self + (-other)

    def __neg__(self) -> "RadialFunction":
        return self.scaled(-1.0)

    def __mul__(self, scalar: float) -> "RadialFunction":
        return self.scaled(scalar)

    __rmul__ = __mul__

    def scaled(self, s: float) -> "RadialFunction":
        if s == 0.0:
            return RadialFunction.zero()
        return RadialFunction(tuple(RadialTerm(t.coeff * s, t.power, t.exponent, t.weight) for t in self.terms))

    def times_r(self, m: int = 1) -> "RadialFunction":
        return RadialFunction(tuple(RadialTerm(t.coeff, t.power + m, t.exponent, t.weight) for t in self.terms))

    def with_weight(self, weight: RationalWeight) -> "RadialFunction":
        if self.rational_weight:
            raise UnsupportedOperationError("a term cannot carry two balance weights")
        return RadialFunction(tuple(RadialTerm(t.coeff, t.power, t.exponent, weight) for t in self.terms))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def rational_weight(self) -> bool:
        return any(t.rational_weight for t in self.terms)

    @property
    def min_power(self) -> int | None:
        if not self.terms:
            return None
        return min(t.power - (t.weight.singular_power if t.weight else 0) for t in self.terms)

    @property
    def coulomb_compatible(self) -> bool:
        # integral of |f|^2 / r converges at the origin
        return self.is_zero or self.min_power >= 1

    @cached_property
    def _arrays(self):
        coeffs = np.array([t.coeff for t in self.terms], dtype=float)
        return (
            np.log(np.abs(coeffs)),
            np.sign(coeffs),
            np.array([t.power for t in self.terms], dtype=float),
            np.array([t.exponent for t in self.terms], dtype=float),
        )

    def __call__(self, r):
        radii = np.atleast_1d(np.asarray(r, dtype=float))
        if self.is_zero:
            out = np.zeros_like(radii)
        else:
            log_c, sign, power, expo = self._arrays
            with np.errstate(divide="ignore", invalid="ignore"):
                log_r = np.log(radii)
                r_part = np.where(power[:, None] == 0.0, 0.0, power[:, None] * log_r[None, :])
                vals = sign[:, None] * np.exp(log_c[:, None] + r_part - expo[:, None] * radii[None, :] ** 2)
            for i, t in enumerate(self.terms):
                if t.weight is not None:
                    vals[i] *= t.weight.factor_array(radii)
            out = vals.sum(axis=0)
        return float(out[0]) if np.ndim(r) == 0 else out

    def __repr__(self) -> str:
        parts = []
        for t in self.terms[:4]:
            w = f"/{t.weight.kind}" if t.weight else ""
            parts.append(f"{t.coeff:+.4g} r^{t.power} e^(-{t.exponent:.4g} r^2){w}")
        more = f" ... ({len(self.terms)} terms)" if len(self.terms) > 4 else ""
        return "RadialFunction(" + (" ".join(parts) or "0") + more + ")"


def _require_plain(f: RadialFunction, op: str) -> None:
    if f.rational_weight:
        raise UnsupportedOperationError(f"{op} is not defined on balance-weighted terms")


def apply_d_minus(f: RadialFunction) -> RadialFunction:
    """(d/dr - 1/r) f:  r^k e^{-ar^2} -> (k-1) r^{k-1} e^{-ar^2} - 2a r^{k+1} e^{-ar^2}."""
    _require_plain(f, "D-")
    out = []
    for t in f.terms:
        if t.power == 0:
            raise UnsupportedOperationError("D- of a power-0 term leaves the term grammar (r^-1)")
        if t.power != 1:
            out.append(RadialTerm((t.power - 1) * t.coeff, t.power - 1, t.exponent))
        out.append(RadialTerm(-2.0 * t.exponent * t.coeff, t.power + 1, t.exponent))
    return RadialFunction.from_terms(out)


def apply_d_plus(f: RadialFunction) -> RadialFunction:
    """(-d/dr - 1/r) f:  r^k e^{-ar^2} -> -(k+1) r^{k-1} e^{-ar^2} + 2a r^{k+1} e^{-ar^2}."""
    _require_plain(f, "D+")
    out = []
    for t in f.terms:
        if t.power == 0:
            raise UnsupportedOperationError("D+ of a power-0 term leaves the term grammar (r^-1)")
        out.append(RadialTerm(-(t.power + 1) * t.coeff, t.power - 1, t.exponent))
        out.append(RadialTerm(2.0 * t.exponent * t.coeff, t.power + 1, t.exponent))
    return RadialFunction.from_terms(out)


def _resolve_weight(weight: Weight) -> tuple[float, int, float]:
    """(prefactor, power shift, extra Gaussian exponent) of a weight."""
    if isinstance(weight, PotentialSpec):
        if weight.kind == "point-coulomb":
            return -weight.alpha_z, -1, 0.0
        if weight.kind == "gaussian-well":
            return weight.depth, 0, 1.0 / weight.width**2
        return 0.0, 0, 0.0
    if weight == "one":
        return 1.0, 0, 0.0
    if weight == "inv_r":
        return 1.0, -1, 0.0
    raise DomainError(f"unknown inner-product weight {weight!r}")


@lru_cache(maxsize=1 << 16)
def _weighted_kernel(
    n: int, c: float, left: RationalWeight | None, right: RationalWeight | None, rtol: float
) -> float:
    """Integral of r^n exp(-c r^2) * left(r) * right(r) over (0, inf) by adaptive quadrature.

    Integrated in x = r sqrt(c), where the integrand's scale is fixed.
    """
    scale = math.sqrt(c)
    weights = [w for w in (left, right) if w is not None]

    def integrand(x: float) -> float:
        if x == 0.0:
            val = 1.0 if n == 0 else 0.0
        else:
            val = math.exp(n * math.log(x) - x * x)
        r = x / scale
        for w in weights:
            val *= w.factor(r)
        return val

    x_max = math.sqrt(max(n, 1) / 2.0) + 9.0
    points = sorted({w.knee * scale for w in weights if 0.0 < w.knee * scale < x_max})
    out = quad(
        integrand, 0.0, x_max, epsabs=0.0, epsrel=rtol, limit=400, points=points or None, full_output=1
    )
    value, abserr = out[0], out[1]
    if len(out) > 3 and abserr > 1e3 * rtol * abs(value):
        raise AccuracyError(
            f"quadrature of r^{n} exp(-{c:.4g} r^2) did not reach rtol={rtol:g}: {out[3]}",
            achieved=abserr / abs(value) if value else math.inf,
        )
    return value * math.exp(-(n + 1) / 2.0 * math.log(c))


def inner(f: RadialFunction, g: RadialFunction, weight: Weight = "one", *, method: str = "auto",
          rtol: float | None = None) -> float:
    """Integral of f(r) g(r) w(r) over (0, inf).

    method="auto" uses closed forms whenever no balance weight is involved;
    method="quadrature" forces the adaptive path (used as an oracle).
    """
    prefactor, shift, extra = _resolve_weight(weight)
    if prefactor == 0.0 or f.is_zero or g.is_zero:
        return 0.0
    rtol = _quadrature["rtol"] if rtol is None else rtol

    fl, fs, fk, fa = f._arrays
    gl, gs, gk, ga = g._arrays
    n = fk[:, None] + gk[None, :] + shift
    c = fa[:, None] + ga[None, :] + extra

    singular = np.array([t.weight.singular_power if t.weight else 0 for t in f.terms])[:, None] + np.array(
        [t.weight.singular_power if t.weight else 0 for t in g.terms]
    )[None, :]
    if np.any(n - singular <= -1.0):
        raise IntegrabilityError("integrand diverges at the origin (Coulomb-incompatible components)")

    closed = method == "auto" and not (f.rational_weight or g.rational_weight)
    if closed:
        logs = fl[:, None] + gl[None, :] + log_moment(n, c)
        return prefactor * float(np.sum(fs[:, None] * gs[None, :] * np.exp(logs)))

    total = 0.0
    for i, ti in enumerate(f.terms):
        for j, tj in enumerate(g.terms):
            kernel = _weighted_kernel(int(n[i, j]), float(c[i, j]), ti.weight, tj.weight, rtol)
            total += ti.coeff * tj.coeff * kernel
    return prefactor * total


def norm_squared(f: RadialFunction) -> float:
    return inner(f, f, "one")
