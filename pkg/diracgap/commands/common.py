# Filename: diracgap/commands/common.py
"""Objects every command builds from a RunConfig."""
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..basis import (
    BasisSet,
    BasisVector,
    ConcentratedTrapFamily,
    ContractedTrapFamily,
    ExponentSet,
    MixedTrapFamily,
    ProjectedTrapFamily,
    builtin_exponents,
    kinetic_balance_basis,
    reference_vectors,
    scheme_basis,
)
from ..config import RunConfig
from ..errors import ConfigError
from ..models import BalanceScheme, PhysicalParams, PotentialSpec
from ..pollution import ExactSpectrum, Thresholds, reference_levels

logger = logging.getLogger(__name__)

TRAP_PARAMETER = {"mixed": "theta", "contracted": "delta", "concentrated": "width_exponent"}


def resolve_exponents(value) -> ExponentSet:
    if isinstance(value, list):
        return ExponentSet.from_values(value)
    try:
        return ExponentSet.from_values([float(value)])
    except ValueError:
        return builtin_exponents(value)


def build_potential(cfg: RunConfig) -> PotentialSpec:
    pot = cfg.potential
    if pot.type == "point-coulomb":
        return PotentialSpec(kind="point-coulomb", z=cfg.physical.z, alpha=cfg.physical.alpha)
    if pot.type == "gaussian-well":
        return PotentialSpec.gaussian_well(pot.depth, pot.width)
    return PotentialSpec.zero()


@dataclass
class RunContext:
    cfg: RunConfig

    @cached_property
    def params(self) -> PhysicalParams:
        return PhysicalParams(alpha=self.cfg.physical.alpha, z=self.cfg.physical.z)

    @cached_property
    def potential(self) -> PotentialSpec:
        try:
            return build_potential(self.cfg)
        except ValueError as exc:
            raise ConfigError(str(exc), key="potential.type") from exc

    @cached_property
    def exps(self) -> ExponentSet:
        return resolve_exponents(self.cfg.basis.exponents)

    @property
    def scheme(self) -> BalanceScheme:
        return self.cfg.basis.scheme

    @property
    def eps(self) -> float | None:
        return self.cfg.basis.eps if self.scheme is BalanceScheme.DUAL_KINETIC_BALANCE else None

    @cached_property
    def aux(self) -> BasisSet:
        return kinetic_balance_basis(self.exps.refined(), self.params)

    @cached_property
    def basis(self) -> BasisSet:
        return scheme_basis(self.scheme, self.exps, self.params, self.potential, self.eps, self.cfg.basis.n_keep)

    @cached_property
    def reference(self) -> ExactSpectrum:
        return reference_levels(self.exps, self.params, self.potential, margin=max(self.cfg.solver.margin, 1e-6))

    @cached_property
    def refs(self) -> list[BasisVector]:
        return reference_vectors(self.exps, self.params, min(self.cfg.classify.n_refs, len(self.exps)))

    @property
    def thresholds(self) -> Thresholds:
        c = self.cfg.classify
        return Thresholds(drift_factor=c.drift_factor, oracle_tol=c.oracle_tol, overlap_tol=c.overlap_tol,
                          drift_floor=c.drift_floor)

    @property
    def b(self) -> float:
        return self.cfg.trap.b_reduced * self.params.alpha**2

    def trap_family(self):
        trap = self.cfg.trap
        if trap.kind == "none":
            return None
        through = self.scheme if trap.inject == "balanced" else None
        if through is BalanceScheme.FREE_BASIS:
            raise ConfigError("a free basis takes traps through inject = projected", key="trap.inject")
        if trap.kind == "mixed":
            if trap.inject == "balanced":
                raise ConfigError("the mixed trap is already two-component", key="trap.inject")
            family = MixedTrapFamily(self.b)
        elif trap.kind == "contracted":
            family = ContractedTrapFamily(self.b, through, self.potential, self.eps)
        else:
            family = ConcentratedTrapFamily(trap.r0, through, self.potential, self.eps)
        if trap.inject == "projected":
            family = ProjectedTrapFamily(family, self.aux)
        return family

    def trap_value(self) -> float:
        trap = self.cfg.trap
        return {"mixed": trap.theta, "contracted": trap.delta, "concentrated": trap.width_exponent}[trap.kind]

    def grid(self) -> np.ndarray:
        s = self.cfg.sweep
        return np.linspace(s.start, s.to, s.steps)
