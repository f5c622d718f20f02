# Filename: diracgap/basis.py
"""Two-component radial basis sets for the five balance disciplines and the pollution traps.

Every emitted BasisVector is unit-normalized: ||u||^2 + ||v||^2 = 1.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .assembly import assemble
from .eigensolve import solve_pencil
from .errors import ConstructionError, DomainError, ParameterError, UnknownNameError
from .models import BalanceScheme, PhysicalParams, PotentialSpec
from .radial import (
    RadialFunction,
    RadialTerm,
    RationalWeight,
    apply_d_minus,
    apply_d_plus,
    inner,
    log_moment,
)
from .utils import ensure_exponent, ensure_in_range, ensure_positive

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BasisVector:
    upper: RadialFunction
    lower: RadialFunction
    label: str = ""

    def __post_init__(self):
        if self.upper.is_zero and self.lower.is_zero:
            raise DomainError(f"basis vector {self.label!r} has both components identically zero")

    @property
    def norm_squared(self) -> float:
        return inner(self.upper, self.upper) + inner(self.lower, self.lower)

    @property
    def coulomb_compatible(self) -> bool:
        return self.upper.coulomb_compatible and self.lower.coulomb_compatible

    def scaled(self, s: float) -> "BasisVector":
        return BasisVector(self.upper.scaled(s), self.lower.scaled(s), self.label)

    def normalized(self) -> "BasisVector":
        n2 = self.norm_squared
        if not n2 > 0:
            raise ConstructionError(f"basis vector {self.label!r} has zero norm")
        return self.scaled(1.0 / math.sqrt(n2))

    def relabeled(self, label: str) -> "BasisVector":
        return replace(self, label=label)


def combine(coeffs, vectors, label: str = "") -> BasisVector:
    """sum_j coeffs[j] * vectors[j], component-wise."""
    upper, lower = [], []
    for c, vec in zip(coeffs, vectors):
        if c == 0.0:
            continue
        upper.extend(vec.upper.scaled(float(c)).terms)
        lower.extend(vec.lower.scaled(float(c)).terms)
    return BasisVector(RadialFunction.from_terms(upper), RadialFunction.from_terms(lower), label)


@dataclass(frozen=True)
class BasisSet:
    vectors: tuple[BasisVector, ...]
    scheme: BalanceScheme
    params: PhysicalParams = field(default_factory=PhysicalParams)
    eps: float | None = None

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i) -> BasisVector:
        return self.vectors[i]

    @property
    def labels(self) -> list[str]:
        return [v.label for v in self.vectors]

    def extended(self, extra) -> "BasisSet":
        return replace(self, vectors=self.vectors + tuple(extra))

    def check_admissible(self, potential: PotentialSpec) -> None:
        if potential.singular_at_origin and not potential.is_zero:
            bad = [v.label for v in self.vectors if not v.coulomb_compatible]
            if bad:
                raise DomainError(f"components not Coulomb-compatible (need min power >= 1): {bad[:5]}")


# --- exponent ladders ---
ZN_6_31G = (
    82400.940, 12372.550, 2818.3510, 1732.5690, 794.57170, 412.71490, 254.72320, 133.67800,
    87.138800, 69.364920, 50.385850, 23.620820, 20.583580, 10.184710, 8.5059400, 4.3340820,
    2.8238420, 1.8109180, 1.0395430, 0.7148410, 0.1432640, 0.0492960,
)  # fmt: skip

_BUILTIN = {"zn-6-31g": ZN_6_31G}


@dataclass(frozen=True)
class ExponentSet:
    """Reduced exponents a_i / alpha^2, ascending and distinct."""

    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise DomainError(f"exponent set {self.name!r} is empty")
        if any(not v > 0 for v in vals):
            raise DomainError(f"exponent set {self.name!r} has non-positive values")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise DomainError(f"exponent set {self.name!r} must be strictly ascending")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_values(cls, values, name: str = "custom") -> "ExponentSet":
        return cls(name, tuple(sorted(set(float(v) for v in values))))

    def __len__(self) -> int:
        return len(self.values)

    def scaled(self, alpha: float) -> np.ndarray:
        return np.asarray(self.values) * alpha**2

    def smallest(self, count: int) -> "ExponentSet":
        return ExponentSet(f"{self.name}[:{count}]", self.values[:count])

    def refined(self) -> "ExponentSet":
        """Geometric midpoints between neighbours plus one step below the smallest: 2n values."""
        vals = self.values
        if len(vals) == 1:
            return ExponentSet(f"{self.name}+refined", (vals[0] / 2.0, vals[0]))
        below = vals[0] ** 2 / vals[1]
        mids = [math.sqrt(a * b) for a, b in zip(vals, vals[1:])]
        return ExponentSet(f"{self.name}+refined", tuple(sorted([below, *vals, *mids])))

    def jittered(self, rng: np.random.Generator, spread: float = 0.2) -> "ExponentSet":
        factors = rng.uniform(1.0 - spread, 1.0 + spread, size=len(self.values))
        return ExponentSet.from_values(np.asarray(self.values) * factors, name=f"{self.name}~{spread:g}")


def builtin_exponents(name: str) -> ExponentSet:
    try:
        values = _BUILTIN[name]
    except KeyError:
        raise UnknownNameError(f"unknown exponent set {name!r}; known: {sorted(_BUILTIN)}", key="basis.exponents")
    return ExponentSet(name, tuple(sorted(values)))


def _seed(exponent: float, power: int = 1) -> RadialFunction:
    return RadialFunction.gaussian(power, ensure_exponent(exponent))


# --- balance rules ---
def balance_weighted(f: RadialFunction, potential: PotentialSpec) -> RadialFunction:
    """(2 - V)^-1 f, as a rational weight where V is not constant."""
    if potential.is_zero:
        return f.scaled(0.5)
    if potential.kind == "point-coulomb":
        # (2 + aZ/r)^-1 = r / (2r + aZ)
        return f.times_r().with_weight(RationalWeight("coulomb", alpha_z=potential.alpha_z))
    if potential.depth >= 2.0:
        raise ConstructionError(f"2 - V vanishes on (0, inf) for {potential.describe()}; atomic balance is singular")
    return f.with_weight(RationalWeight("well", depth=potential.depth, width=potential.width))


def balanced_vectors(
    seed: RadialFunction,
    scheme: BalanceScheme,
    params: PhysicalParams | None = None,
    potential: PotentialSpec | None = None,
    eps: float | None = None,
    label: str = "seed",
) -> list[BasisVector]:
    """The pair of vectors a discipline generates from one upper seed."""
    scheme = BalanceScheme(scheme)
    zero = RadialFunction.zero()
    if scheme is BalanceScheme.UPPER_LOWER:
        pair = BasisVector(seed, zero, f"ul:{label}:u"), BasisVector(zero, seed, f"ul:{label}:l")
    elif scheme is BalanceScheme.KINETIC_BALANCE:
        pair = BasisVector(seed, zero, f"kb:{label}:u"), BasisVector(zero, apply_d_minus(seed), f"kb:{label}:l")
    elif scheme is BalanceScheme.ATOMIC_BALANCE:
        if potential is None:
            raise ParameterError("atomic balance needs the potential", key="potential.type")
        lower = balance_weighted(apply_d_minus(seed), potential)
        pair = BasisVector(seed, zero, f"ab:{label}:u"), BasisVector(zero, lower, f"ab:{label}:l")
    elif scheme is BalanceScheme.DUAL_KINETIC_BALANCE:
        eps = ensure_in_range(eps if eps is not None else math.nan, 0.0, 1.0, "basis.eps", lo_open=True)
        w = seed.times_r()
        pair = (
            BasisVector(seed, apply_d_minus(seed).scaled(eps), f"dkb:{label}:1"),
            BasisVector(apply_d_plus(w).scaled(eps), -w, f"dkb:{label}:2"),
        )
    else:
        raise ParameterError("the free basis has no seed rule; use free_basis/project_free", key="basis.scheme")
    return [v.normalized() for v in pair]


def _scheme_basis(exps, params, scheme, potential=None, eps=None, extra_uppers=()) -> BasisSet:
    vectors = []
    for a in exps.scaled(params.alpha):
        vectors += balanced_vectors(_seed(a), scheme, params, potential, eps, label=f"a={a:.6g}")
    for k, u in enumerate(extra_uppers):
        vectors += balanced_vectors(u, scheme, params, potential, eps, label=f"extra{k}")
    basis = BasisSet(tuple(vectors), BalanceScheme(scheme), params, eps)
    logger.debug("built %s basis: %d vectors from %s", scheme, len(basis), exps.name)
    return basis


def upper_lower_basis(exps: ExponentSet, params: PhysicalParams) -> BasisSet:
    return _scheme_basis(exps, params, BalanceScheme.UPPER_LOWER)


def kinetic_balance_basis(exps: ExponentSet, params: PhysicalParams, extra_uppers=()) -> BasisSet:
    for u in extra_uppers:
        if u.rational_weight:
            raise DomainError("kinetic-balance extra uppers must be polynomial x Gaussian")
    return _scheme_basis(exps, params, BalanceScheme.KINETIC_BALANCE, extra_uppers=extra_uppers)


def atomic_balance_basis(exps: ExponentSet, params: PhysicalParams, potential: PotentialSpec,
                         extra_uppers=()) -> BasisSet:
    return _scheme_basis(exps, params, BalanceScheme.ATOMIC_BALANCE, potential, extra_uppers=extra_uppers)


def dual_kinetic_balance_basis(exps: ExponentSet, params: PhysicalParams, eps: float, extra_uppers=()) -> BasisSet:
    ensure_in_range(eps, 0.0, 1.0, "basis.eps", lo_open=True)
    return _scheme_basis(exps, params, BalanceScheme.DUAL_KINETIC_BALANCE, eps=eps, extra_uppers=extra_uppers)


def scheme_basis(scheme: BalanceScheme, exps: ExponentSet, params: PhysicalParams, potential: PotentialSpec,
                 eps: float | None = None, n_keep: int | None = None) -> BasisSet:
    """Dispatch used by the CLI and the sweep harness."""
    scheme = BalanceScheme(scheme)
    if scheme is BalanceScheme.UPPER_LOWER:
        return upper_lower_basis(exps, params)
    if scheme is BalanceScheme.KINETIC_BALANCE:
        return kinetic_balance_basis(exps, params)
    if scheme is BalanceScheme.ATOMIC_BALANCE:
        return atomic_balance_basis(exps, params, potential)
    if scheme is BalanceScheme.DUAL_KINETIC_BALANCE:
        return dual_kinetic_balance_basis(exps, params, eps)
    aux = kinetic_balance_basis(exps.refined(), params)
    if n_keep is not None:
        return free_basis(params, n_keep, aux)
    return free_projected_basis(kinetic_balance_basis(exps, params), aux)


# --- free-operator spectral subspaces ---
FREE_EDGE_SLACK = 1e-9  # round-off allowed when deciding |lambda| >= 1


@lru_cache(maxsize=8)
def free_spectrum(aux: BasisSet):
    """Solved free pencil (V = 0) over aux; its residuals measure the projection quality."""
    return solve_pencil(assemble(aux, PotentialSpec.zero()))


def free_basis(params: PhysicalParams, n_keep: int, aux: BasisSet) -> BasisSet:
    """n_keep approximate electronic and n_keep positronic states of the free operator over aux."""
    if n_keep < 1 or 2 * n_keep > len(aux):
        raise ParameterError(f"need 1 <= n_keep and 2*n_keep <= {len(aux)}, got {n_keep}", key="basis.n_keep")
    spectrum = free_spectrum(aux)
    values, vecs = spectrum.eigenvalues, spectrum.eigenvectors
    edge = 1.0 - FREE_EDGE_SLACK
    positive = list(np.flatnonzero(values >= edge))[:n_keep]
    negative = list(np.flatnonzero(values <= -edge))[::-1][:n_keep]
    inside = int(np.sum(np.abs(values) < edge))
    if inside:
        logger.warning("free pencil over %d vectors has %d states inside the gap, none kept", len(aux), inside)
    if len(positive) < n_keep or len(negative) < n_keep:
        raise ConstructionError(
            f"free pencil over {len(aux)} vectors has {int((values >= edge).sum())} states at or above 1 and "
            f"{int((values <= -edge).sum())} at or below -1, need {n_keep} each"
        )
    vectors = [combine(vecs[:, i], aux.vectors, f"free+:{values[i]:.6g}") for i in positive]
    vectors += [combine(vecs[:, i], aux.vectors, f"free-:{values[i]:.6g}") for i in negative]
    return BasisSet(tuple(v.normalized() for v in vectors), BalanceScheme.FREE_BASIS, params)


def project_free(vectors, aux: BasisSet, drop_below: float = 1e-8, keep: str = "both") -> list[BasisVector]:
    """Approximate P+ and P- projections of each vector, expressed in the aux span.

    keep="both" returns every projection above drop_below of the vector's weight;
    keep="dominant" only the one carrying more weight.
    """
    spectrum = free_spectrum(aux)
    values, vecs = spectrum.eigenvalues, spectrum.eigenvectors
    out = []
    for vec in vectors:
        cross = np.array([inner(b.upper, vec.upper) + inner(b.lower, vec.lower) for b in aux.vectors])
        amplitudes = vecs.T @ cross
        total = vec.norm_squared
        parts = []
        for sign, mask in (("+", values > 0), ("-", values < 0)):
            amp = np.where(mask, amplitudes, 0.0)
            parts.append((float(amp @ amp), sign, amp))
        if keep == "dominant":
            parts = [max(parts, key=lambda part: part[0])]
        for weight, sign, amp in parts:
            if weight <= drop_below * total:
                logger.debug("dropping P%s of %s (projected weight %.3g)", sign, vec.label, weight / total)
                continue
            out.append(combine(vecs @ amp, aux.vectors, f"P{sign}({vec.label})").normalized())
    return out


def free_projected_basis(base: BasisSet, aux: BasisSet) -> BasisSet:
    """The dominant free projection of every base vector: electronic parts of upper-like vectors,
    positronic parts of lower-like ones."""
    return BasisSet(tuple(project_free(base.vectors, aux, keep="dominant")), BalanceScheme.FREE_BASIS, base.params)


# --- pollution traps ---
def mixed_trap_vector(theta: float, b: float, params: PhysicalParams | None = None) -> BasisVector:
    """cos(theta) r e^{-br^2} upper, sin(theta) r e^{-br^2} lower."""
    ensure_exponent(b, "b")
    c, s = math.cos(theta), math.sin(theta)
    c, s = (0.0 if abs(x) < 1e-15 else x for x in (c, s))
    profile = _seed(b)
    return BasisVector(profile.scaled(c), profile.scaled(s), f"mixed:theta={theta:.6g}").normalized()


def contracted_trap(b: float, delta: float, params: PhysicalParams | None = None) -> RadialFunction:
    """r (e^{-br^2} + delta^{1/4} e^{-b delta r^2})."""
    ensure_exponent(b, "b")
    if not delta > 1:
        raise ParameterError(f"contraction ratio must exceed 1, got {delta!r}", key="trap.delta")
    ensure_exponent(b * delta, "b*delta")
    return RadialFunction.from_terms([RadialTerm(1.0, 1, b), RadialTerm(delta**0.25, 1, b * delta)])


_SERIES_DROP = 30.0  # e^-30 per dropped term, relative to the largest
_SERIES_CAP = 4000


def concentrated_trap(r0: float, width_exponent: float, params: PhysicalParams | None = None,
                      residual_tol: float = 1e-3) -> BasisVector:
    """Pure-upper bump r e^{-a (r - r0)^2}, realized as the positive series
    e^{-a r0^2} sum_k (2 a r0)^k / k! r^{k+1} e^{-a r^2}."""
    ensure_positive(r0, "r0")
    a = ensure_exponent(width_exponent, "width_exponent")
    if not 3.0 / math.sqrt(2.0 * a) < r0:
        raise ParameterError(f"bump too wide for r0={r0}: need 3/sqrt(2a) < r0", key="trap.width_exponent")
    centre = 2.0 * a * r0 * r0
    k_max = int(centre + 12.0 * math.sqrt(centre + 1.0) + 40.0)
    if k_max > _SERIES_CAP:
        raise ConstructionError(f"bump series needs {k_max} terms (cap {_SERIES_CAP}); lower a or r0")

    k = np.arange(k_max + 1, dtype=float)
    log_c = -a * r0 * r0 + k * math.log(2.0 * a * r0) - gammaln(k + 1.0)
    log_norm = log_c + 0.5 * log_moment(2.0 * k + 2.0, 2.0 * a)
    if log_norm[-1] > log_norm.max() - _SERIES_DROP:
        raise ConstructionError("bump series did not converge within its truncation")
    keep = np.flatnonzero(log_norm > log_norm.max() - _SERIES_DROP)
    u = RadialFunction(tuple(RadialTerm(float(np.exp(log_c[i])), int(i) + 1, a) for i in keep))

    half = 4.0 / math.sqrt(a)
    grid = np.linspace(max(r0 - half, 1e-6), r0 + half, 200)
    target = grid * np.exp(-a * (grid - r0) ** 2)
    residual = np.max(np.abs(u(grid) - target)) / np.max(np.abs(target))
    if residual > residual_tol:
        raise ConstructionError(f"bump series residual {residual:.3g} exceeds {residual_tol:g}")
    logger.debug("concentrated trap r0=%g a=%g: %d terms, residual %.2e", r0, a, len(u.terms), residual)
    return BasisVector(u, RadialFunction.zero(), f"bump:r0={r0:.6g},a={a:.6g}").normalized()


# Trap families: picklable values mapping one sweep parameter to the vectors appended at that point.
@dataclass(frozen=True)
class MixedTrapFamily:
    b: float
    parameter: str = "theta"

    def __call__(self, theta: float) -> list[BasisVector]:
        return [mixed_trap_vector(theta, self.b)]


@dataclass(frozen=True)
class ContractedTrapFamily:
    """Contracted upper pushed through a balance rule (None: appended as a bare upper)."""

    b: float
    scheme: BalanceScheme | None = BalanceScheme.KINETIC_BALANCE
    potential: PotentialSpec | None = None
    eps: float | None = None
    parameter: str = "delta"

    def __call__(self, delta: float) -> list[BasisVector]:
        u = contracted_trap(self.b, delta)
        if self.scheme is None:
            return [BasisVector(u, RadialFunction.zero(), f"contracted:delta={delta:.6g}").normalized()]
        return balanced_vectors(u, self.scheme, None, self.potential, self.eps, label=f"delta={delta:.6g}")


@dataclass(frozen=True)
class ConcentratedTrapFamily:
    r0: float
    scheme: BalanceScheme | None = None
    potential: PotentialSpec | None = None
    eps: float | None = None
    parameter: str = "width_exponent"

    def __call__(self, a: float) -> list[BasisVector]:
        bump = concentrated_trap(self.r0, a)
        if self.scheme is None:
            return [bump]
        return balanced_vectors(bump.upper, self.scheme, None, self.potential, self.eps, label=bump.label)


@dataclass(frozen=True)
class ProjectedTrapFamily:
    """Replaces the wrapped family's vectors by their approximate free projections."""

    inner_family: object
    aux: BasisSet

    @property
    def parameter(self) -> str:
        return self.inner_family.parameter

    def __call__(self, value: float) -> list[BasisVector]:
        return project_free(self.inner_family(value), self.aux)


@dataclass(frozen=True)
class DualBalanceEpsFamily:
    """Whole DKB basis (exponent ladder plus extra uppers) rebuilt at each eps."""

    exps: ExponentSet
    params: PhysicalParams
    extra_uppers: tuple[RadialFunction, ...] = ()
    parameter: str = "eps"

    def __call__(self, eps: float) -> BasisSet:
        return dual_kinetic_balance_basis(self.exps, self.params, eps, extra_uppers=self.extra_uppers)


def reference_vectors(exps: ExponentSet, params: PhysicalParams, count: int = 10) -> list[BasisVector]:
    """Pure-upper vectors of the `count` most diffuse exponents: fixed states for overlap decay."""
    return [
        BasisVector(_seed(a), RadialFunction.zero(), f"ref:a={a:.6g}").normalized()
        for a in exps.smallest(count).scaled(params.alpha)
    ]
