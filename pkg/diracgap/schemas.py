# Filename: diracgap/schemas.py
import math
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict


def _finite_or_none(values) -> list[Optional[float]]:
    return [None if (v is None or math.isnan(v)) else float(v) for v in values]


class PencilMeta(BaseModel):
    labels: List[str]
    potential: str
    hermiticity_defect: float


class PencilOut(BaseModel):
    dim: int
    h: List[List[float]]
    s: List[List[float]]
    meta: PencilMeta

    model_config = ConfigDict(from_attributes=True)

    @classmethod
    def from_pencil(cls, p) -> "PencilOut":
        return cls(
            dim=p.dim,
            h=p.h.tolist(),
            s=p.s.tolist(),
            meta=PencilMeta(labels=list(p.labels), potential=p.potential.describe(),
                            hermiticity_defect=p.hermiticity_defect),
        )

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        shape = (self.dim, self.dim)
        return np.array(self.h, dtype=float).reshape(shape), np.array(self.s, dtype=float).reshape(shape)


class GapLevelOut(BaseModel):
    index: int
    energy: float
    reference_distance: Optional[float] = None


class SpectrumOut(BaseModel):
    eigenvalues: List[float]
    n_discarded: int
    s_condition: float
    residual_max: float
    gap: List[GapLevelOut] = []

    model_config = ConfigDict(from_attributes=True)

    @classmethod
    def from_result(cls, r, gap=(), reference=None) -> "SpectrumOut":
        levels = [
            GapLevelOut(index=i, energy=e,
                        reference_distance=None if reference is None or not reference.levels else reference.distance(e))
            for i, e in gap
        ]
        return cls(eigenvalues=r.eigenvalues.tolist(), n_discarded=r.n_discarded, s_condition=r.s_condition,
                   residual_max=r.residual_max, gap=levels)


class TrajectoryOut(BaseModel):
    values: List[Optional[float]]
    drift: float
    oracle_distance: Optional[float]
    overlap_decay: List[Optional[float]]
    spurious: Optional[bool]
    criteria: List[str]

    model_config = ConfigDict(from_attributes=True)

    @classmethod
    def from_trajectory(cls, t) -> "TrajectoryOut":
        return cls(
            values=_finite_or_none(t.values),
            drift=t.drift,
            oracle_distance=t.oracle_distance if math.isfinite(t.oracle_distance) else None,
            overlap_decay=_finite_or_none(t.overlap_decay),
            spurious=t.spurious,
            criteria=list(t.criteria),
        )


class SweepOut(BaseModel):
    parameter: str
    grid: List[float]
    trajectories: List[TrajectoryOut]
    warnings: List[str]
    n_discarded: List[int]

    model_config = ConfigDict(from_attributes=True)

    @classmethod
    def from_trace(cls, trace) -> "SweepOut":
        return cls(
            parameter=trace.parameter,
            grid=trace.grid.tolist(),
            trajectories=[TrajectoryOut.from_trajectory(t) for t in trace.trajectories],
            warnings=list(trace.warnings),
            n_discarded=list(trace.n_discarded),
        )


class IntervalReportOut(BaseModel):
    scheme: str
    potential: str
    upper: str
    lower: str
    unmatched: List[float]
    violations: List[float]
    whole_gap: bool
    compliant: bool

    model_config = ConfigDict(from_attributes=True)

    @classmethod
    def from_report(cls, report) -> "IntervalReportOut":
        return cls(
            scheme=str(report.scheme),
            potential=report.potential.describe(),
            upper=str(report.upper),
            lower=str(report.lower),
            unmatched=list(report.unmatched),
            violations=list(report.violations),
            whole_gap=report.whole_gap,
            compliant=report.compliant,
        )
