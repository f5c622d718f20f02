# Filename: diracgap/models.py
"""Physical parameters, potentials and the pollution intervals every other module queries.

Units are m = c = hbar = 1, so energies are in units of mc^2 and the gap is (-1, 1).
"""
import math
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import DomainError, ParameterError

DEFAULT_ALPHA = 1.0 / 137.0
COULOMB_BOUND = math.sqrt(3.0) / 2.0


class BalanceScheme(StrEnum):
    UPPER_LOWER = "upper-lower"
    KINETIC_BALANCE = "kinetic-balance"
    ATOMIC_BALANCE = "atomic-balance"
    DUAL_KINETIC_BALANCE = "dual-kinetic-balance"
    FREE_BASIS = "free-basis"


class PhysicalParams(BaseModel):
    alpha: float = Field(default=DEFAULT_ALPHA, gt=0, description="fine-structure coupling e^2")
    z: float = Field(default=30.0, ge=0, description="nuclear charge number")
    kappa: int = -1

    model_config = ConfigDict(frozen=True)

    @field_validator("kappa")
    @classmethod
    def _only_s_channel(cls, v: int) -> int:
        if v != -1:
            raise ValueError("only the kappa = -1 channel is supported")
        return v

    @property
    def alpha_z(self) -> float:
        return self.alpha * self.z


class PotentialSpec(BaseModel):
    kind: Literal["point-coulomb", "gaussian-well", "zero"] = "zero"
    # point Coulomb
    z: float = 0.0
    alpha: float = DEFAULT_ALPHA
    # Gaussian well V(r) = depth * exp(-r^2 / width^2)
    depth: float = 0.0
    width: float = 1.0

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check(self) -> "PotentialSpec":
        if self.kind == "point-coulomb":
            if self.z < 0 or self.alpha <= 0:
                raise ValueError("point Coulomb needs z >= 0 and alpha > 0")
            if self.alpha * self.z > COULOMB_BOUND:
                raise ValueError(
                    f"alpha*Z = {self.alpha * self.z:.6f} exceeds sqrt(3)/2; the operator domain is ambiguous"
                )
        if self.kind == "gaussian-well" and not self.width > 0:
            raise ValueError("gaussian well width must be positive")
        return self

    @classmethod
    def point_coulomb(cls, params: PhysicalParams) -> "PotentialSpec":
        return cls(kind="point-coulomb", z=params.z, alpha=params.alpha)

    @classmethod
    def gaussian_well(cls, depth: float, width: float) -> "PotentialSpec":
        return cls(kind="gaussian-well", depth=depth, width=width)

    @classmethod
    def zero(cls) -> "PotentialSpec":
        return cls(kind="zero")

    @property
    def alpha_z(self) -> float:
        return self.alpha * self.z if self.kind == "point-coulomb" else 0.0

    @property
    def singular_at_origin(self) -> bool:
        return self.kind == "point-coulomb"

    @property
    def bounded(self) -> bool:
        return self.kind != "point-coulomb"

    @property
    def inf_v(self) -> float:
        if self.kind == "point-coulomb":
            return -math.inf
        if self.kind == "gaussian-well":
            return min(self.depth, 0.0)
        return 0.0

    @property
    def sup_v(self) -> float:
        if self.kind == "gaussian-well":
            return max(self.depth, 0.0)
        return 0.0

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or (self.kind == "gaussian-well" and self.depth == 0.0) or (
            self.kind == "point-coulomb" and self.z == 0.0
        )

    def describe(self) -> str:
        if self.kind == "point-coulomb":
            return f"point-coulomb(Z={self.z:g}, alpha={self.alpha:.9g})"
        if self.kind == "gaussian-well":
            return f"gaussian-well(V0={self.depth:g}, w={self.width:g})"
        return "zero"


class GapInterval(BaseModel):
    """Closed energy interval inside [-1, 1]; lo > hi is the canonical empty interval."""

    lo: float
    hi: float

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _inside_gap(self) -> "GapInterval":
        if self.lo <= self.hi and not (-1.0 <= self.lo and self.hi <= 1.0):
            raise ValueError(f"interval [{self.lo}, {self.hi}] leaves [-1, 1]")
        return self

    @classmethod
    def empty(cls) -> "GapInterval":
        return cls(lo=1.0, hi=-1.0)

    @classmethod
    def clamped(cls, lo: float, hi: float) -> "GapInterval":
        lo, hi = max(-1.0, lo), min(1.0, hi)
        return cls(lo=lo, hi=hi) if lo <= hi else cls.empty()

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    @property
    def meets_open_gap(self) -> bool:
        return not self.is_empty and self.lo < 1.0 and self.hi > -1.0

    def contains(self, energy: float, tol: float = 0.0) -> bool:
        return not self.is_empty and self.lo - tol <= energy <= self.hi + tol

    def __str__(self) -> str:
        return "empty" if self.is_empty else f"[{self.lo:.6g}, {self.hi:.6g}]"


def evaluate_potential(spec: PotentialSpec, r):
    """V(r) for scalar or array r > 0."""
    radii = np.asarray(r, dtype=float)
    if np.any(radii <= 0):
        raise DomainError("potential evaluated at r <= 0 (Coulomb term is singular at the origin)")
    if spec.kind == "point-coulomb":
        out = -spec.alpha_z / radii
    elif spec.kind == "gaussian-well":
        out = spec.depth * np.exp(-(radii**2) / spec.width**2)
    else:
        out = np.zeros_like(radii)
    return float(out) if out.ndim == 0 else out


def dkb_shift(eps: float) -> float:
    return 2.0 * (1.0 / eps - 1.0)


def theorem_intervals(
    scheme: BalanceScheme, spec: PotentialSpec, eps: float | None = None
) -> tuple[GapInterval, GapInterval]:
    """(upper, lower) closed intervals where spurious modes may occur for `scheme` on `spec`."""
    scheme = BalanceScheme(scheme)
    if scheme is BalanceScheme.DUAL_KINETIC_BALANCE:
        if eps is None or not (0.0 < eps <= 1.0):
            raise ParameterError(f"dual kinetic balance needs eps in (0, 1], got {eps!r}", key="basis.eps")
    empty = GapInterval.empty()
    # none of the disciplines pollutes the free operator
    if spec.is_zero:
        return empty, empty

    inf_v, sup_v = spec.inf_v, spec.sup_v
    upper_lower = (
        GapInterval.clamped(1.0 + inf_v, 1.0),
        GapInterval.clamped(-1.0, sup_v - 1.0),
    )

    if scheme is BalanceScheme.UPPER_LOWER:
        return upper_lower
    if scheme is BalanceScheme.KINETIC_BALANCE:
        if spec.bounded and sup_v <= 2.0:
            return empty, upper_lower[1]
        if spec.bounded:
            return upper_lower
        return GapInterval.clamped(-1.0, 1.0), upper_lower[1]
    if scheme is BalanceScheme.ATOMIC_BALANCE:
        if sup_v <= 0.0:
            return empty, empty
        return empty, upper_lower[1]
    if scheme is BalanceScheme.DUAL_KINETIC_BALANCE:
        shift = dkb_shift(eps)
        return (
            GapInterval.clamped(1.0 + shift + inf_v, 1.0),
            GapInterval.clamped(-1.0, sup_v - 1.0 - shift),
        )
    return empty, empty
