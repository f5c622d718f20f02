# Filename: diracgap/pollution.py
"""Reference spectra, trap sweeps with trajectory tracking, spuriousness verdicts and
checks of the pollution intervals."""
import logging
import math
import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .assembly import Pencil, append_vectors, assemble
from .basis import (
    BasisSet,
    BasisVector,
    ExponentSet,
    ProjectedTrapFamily,
    free_projected_basis,
    free_spectrum,
    kinetic_balance_basis,
)
from .config import settings
from .eigensolve import SpectrumResult, gap_eigenvalues, solve_pencil
from .errors import DomainError, ParameterError
from .models import BalanceScheme, GapInterval, PhysicalParams, PotentialSpec, theorem_intervals
from .radial import inner, quadrature_rtol, set_quadrature_rtol

logger = logging.getLogger(__name__)

MATCH_WARN_DISTANCE = 0.5  # a quarter of the gap width


@dataclass(frozen=True)
class ExactSpectrum:
    levels: tuple[tuple[int, float], ...]
    params: PhysicalParams
    source: str = "exact"

    @property
    def energies(self) -> np.ndarray:
        return np.array([e for _, e in self.levels], dtype=float)

    def distance(self, energy: float) -> float:
        if not self.levels:
            return math.inf
        return float(np.min(np.abs(self.energies - energy)))

    def level(self, n: int) -> float:
        for k, e in self.levels:
            if k == n:
                return e
        raise DomainError(f"level {n} not in this spectrum")


def exact_levels(params: PhysicalParams, n_max: int = 8) -> ExactSpectrum:
    """kappa = -1 Dirac-Coulomb levels E_n = [1 + (aZ / (n - 1 + gamma))^2]^(-1/2), gamma = sqrt(1 - (aZ)^2)."""
    az = params.alpha_z
    if az >= 1.0:
        raise DomainError(f"alpha*Z = {az:.6f} >= 1 has no kappa = -1 ground state")
    gamma = math.sqrt(1.0 - az * az)
    levels = tuple((n, 1.0 / math.sqrt(1.0 + (az / (n - 1 + gamma)) ** 2)) for n in range(1, n_max + 1))
    return ExactSpectrum(levels, params)


def ground_level(result: SpectrumResult) -> float:
    """Lowest eigenvalue in (0, 1), NaN when there is none."""
    inside = [e for e in result.eigenvalues if 0.0 < e < 1.0]
    return float(inside[0]) if inside else math.nan


def displaced_eigenvalue(base: SpectrumResult, extended: SpectrumResult, margin: float = 0.0) -> float:
    """Gap eigenvalue of the extended pencil farthest from every gap eigenvalue of the base one:
    the level the appended vectors brought in."""
    old = np.array([e for _, e in gap_eigenvalues(base, margin)])
    new = [e for _, e in gap_eigenvalues(extended, margin)]
    if not new:
        return math.nan
    if old.size == 0:
        return new[0]
    return max(new, key=lambda e: float(np.min(np.abs(old - e))))


def reference_levels(exps: ExponentSet, params: PhysicalParams, potential: PotentialSpec,
                     margin: float = 1e-6) -> ExactSpectrum:
    """Exact levels for Coulomb; otherwise gap eigenvalues of a refined kinetic-balance basis."""
    if potential.kind == "point-coulomb":
        return exact_levels(PhysicalParams(alpha=potential.alpha, z=potential.z))
    if potential.is_zero:
        return ExactSpectrum((), params, source="free")
    basis = kinetic_balance_basis(exps.refined(), params)
    result = solve_pencil(assemble(basis, potential))
    levels = tuple((n, e) for n, (_, e) in enumerate(gap_eigenvalues(result, margin), start=1))
    logger.info("reference for %s: %d gap levels from %d vectors", potential.describe(), len(levels), len(basis))
    return ExactSpectrum(levels, params, source=f"kinetic-balance/{len(basis)}")


# --- sweeps ---
@dataclass
class Trajectory:
    values: np.ndarray
    overlap_decay: np.ndarray
    drift: float = 0.0
    oracle_distance: float = math.inf
    spurious: bool | None = None
    criteria: tuple[str, ...] = ()

    @property
    def populated(self) -> np.ndarray:
        return np.flatnonzero(~np.isnan(self.values))

    @property
    def final_overlap(self) -> float:
        idx = self.populated
        return float(self.overlap_decay[idx[-1]]) if idx.size else math.nan


@dataclass
class SweepTrace:
    parameter: str
    grid: np.ndarray
    trajectories: list[Trajectory]
    warnings: list[str] = field(default_factory=list)
    n_discarded: list[int] = field(default_factory=list)
    classified: bool = False

    @property
    def flagged(self) -> list[int]:
        return [k for k, t in enumerate(self.trajectories) if t.spurious]


@dataclass(frozen=True)
class _PointJob:
    value: float
    base_pencil: Pencil | None
    potential: PotentialSpec
    trap: object
    rebuild: object
    refs: tuple[BasisVector, ...]
    base_ref_overlaps: np.ndarray | None
    overlap_threshold: float
    margin: float
    quad_rtol: float = 1e-12


def _ref_overlaps(refs, vectors) -> np.ndarray:
    return np.array(
        [[inner(r.upper, b.upper) + inner(r.lower, b.lower) for b in vectors] for r in refs]
    ).reshape(len(refs), len(vectors))


def _evaluate_point(job: _PointJob):
    set_quadrature_rtol(job.quad_rtol)
    if job.rebuild is not None:
        basis = job.rebuild(job.value)
        pencil = assemble(basis, job.potential)
        extras = list(job.trap(job.value)) if job.trap is not None else []
        pencil = append_vectors(pencil, job.potential, extras)
        overlaps = _ref_overlaps(job.refs, pencil.vectors)
    else:
        extras = list(job.trap(job.value))
        pencil = append_vectors(job.base_pencil, job.potential, extras)
        overlaps = np.hstack([job.base_ref_overlaps, _ref_overlaps(job.refs, extras)])
    result = solve_pencil(pencil, job.overlap_threshold)
    gap = gap_eigenvalues(result, job.margin)
    values = [e for _, e in gap]
    if overlaps.size:
        decay = [float(np.max(np.abs(overlaps @ result.eigenvectors[:, i]))) for i, _ in gap]
    else:
        decay = [math.nan] * len(gap)
    return values, decay, result.n_discarded


def _match(grid, per_point, warnings) -> list[Trajectory]:
    """Greedy nearest-value assignment of each point's values to running trajectories."""
    n = len(grid)
    tracks: list[tuple[list, list]] = []
    last: list[float] = []
    for p, (values, decay) in enumerate(per_point):
        pairs = sorted(
            (abs(v - last[t]), t, i) for t in range(len(tracks)) for i, v in enumerate(values)
        )
        used_t, used_i = set(), set()
        for dist, t, i in pairs:
            if t in used_t or i in used_i:
                continue
            used_t.add(t)
            used_i.add(i)
            if dist > MATCH_WARN_DISTANCE:
                warnings.append(f"point {p} ({grid[p]:.6g}): trajectory {t} jumped by {dist:.3g}")
            tracks[t][0][p] = values[i]
            tracks[t][1][p] = decay[i]
            last[t] = values[i]
        for i, v in enumerate(values):
            if i not in used_i:
                vals, dec = [math.nan] * n, [math.nan] * n
                vals[p], dec[p] = v, decay[i]
                tracks.append((vals, dec))
                last.append(v)
    return [Trajectory(np.array(v, dtype=float), np.array(d, dtype=float)) for v, d in tracks]


def _drift(values: np.ndarray) -> float:
    steps = np.abs(np.diff(values))
    steps = steps[~np.isnan(steps)]
    return float(steps.max()) if steps.size else 0.0


def sweep(base: BasisSet | None, potential: PotentialSpec, trap, grid, refs=(), *,
          exact: ExactSpectrum | None = None, rebuild=None, overlap_threshold: float = 1e-10,
          margin: float = 0.0, workers: int | None = None) -> SweepTrace:
    """Append trap(value) to base (or rebuild the basis with rebuild(value)) at every grid value,
    solve, keep the gap eigenvalues and thread them into trajectories."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ParameterError("sweep grid is empty", key="sweep.steps")
    if trap is None and rebuild is None:
        raise ParameterError("a sweep needs a trap family or a basis family", key="trap.kind")
    refs = tuple(refs)
    parameter = (rebuild or trap).parameter

    base_pencil = base_overlaps = None
    if rebuild is None:
        base_pencil = assemble(base, potential)
        base_overlaps = _ref_overlaps(refs, base.vectors)
    jobs = [
        _PointJob(float(v), base_pencil, potential, trap, rebuild, refs, base_overlaps, overlap_threshold, margin,
                  quadrature_rtol())
        for v in grid
    ]
    workers = settings.sweep_workers if workers is None else workers
    if workers > 1:
        with multiprocessing.Pool(processes=workers) as pool:
            outcomes = pool.map(_evaluate_point, jobs)
    else:
        outcomes = [_evaluate_point(job) for job in jobs]

    warnings: list[str] = []
    trajectories = _match(grid, [(v, d) for v, d, _ in outcomes], warnings)
    for t in trajectories:
        t.drift = _drift(t.values)
        if exact is not None:
            t.oracle_distance = min((exact.distance(e) for e in t.values[t.populated]), default=math.inf)
    for w in warnings:
        logger.warning("tracking: %s", w)
    logger.info("sweep over %s: %d points, %d trajectories", parameter, grid.size, len(trajectories))
    return SweepTrace(parameter, grid, trajectories, warnings, [k for _, _, k in outcomes])


@dataclass(frozen=True)
class Thresholds:
    drift_factor: float = 10.0
    oracle_tol: float = 1e-3
    overlap_tol: float = 0.05
    # per-step moves below the agreement tolerance of converged levels are not instability
    drift_floor: float = 1e-6


def classify(trace: SweepTrace, exact: ExactSpectrum, thresholds: Thresholds = Thresholds()) -> SweepTrace:
    """Spurious when at least two of: unstable (drift), far from every reference level,
    vanishing overlap with the fixed reference states."""
    if trace.grid.size == 0:
        raise ParameterError("cannot classify an empty sweep", key="sweep.steps")
    drifts = [t.drift for t in trace.trajectories]
    median = float(np.median(drifts)) if drifts else 0.0
    for t in trace.trajectories:
        populated = t.values[t.populated]
        t.oracle_distance = min((exact.distance(e) for e in populated), default=math.inf)
        criteria = []
        if t.drift > thresholds.drift_factor * median and t.drift > thresholds.drift_floor:
            criteria.append("drift")
        if t.oracle_distance > thresholds.oracle_tol:
            criteria.append("oracle")
        final = t.final_overlap
        if not math.isnan(final) and final < thresholds.overlap_tol:
            criteria.append("overlap")
        t.criteria = tuple(criteria)
        t.spurious = len(criteria) >= 2
    trace.classified = True
    if trace.flagged:
        logger.info("flagged %d of %d trajectories as spurious", len(trace.flagged), len(trace.trajectories))
    return trace


@dataclass
class IntervalReport:
    scheme: BalanceScheme
    potential: PotentialSpec
    upper: GapInterval
    lower: GapInterval
    unmatched: list[float]
    violations: list[float]
    whole_gap: bool = False

    @property
    def compliant(self) -> bool:
        return not self.violations


def check_theorem_intervals(result: SpectrumResult, scheme: BalanceScheme, potential: PotentialSpec,
                            eps: float | None = None, reference: ExactSpectrum | None = None,
                            oracle_tol: float = 1e-3, margin: float = 1e-6,
                            tol: float = 1e-9) -> IntervalReport:
    """Every gap eigenvalue that matches no reference level must lie in the pollution intervals."""
    upper, lower = theorem_intervals(scheme, potential, eps)
    unmatched = [
        e for _, e in gap_eigenvalues(result, margin)
        if reference is None or reference.distance(e) > oracle_tol
    ]
    violations = [e for e in unmatched if not (upper.contains(e, tol) or lower.contains(e, tol))]
    report = IntervalReport(
        BalanceScheme(scheme), potential, upper, lower, unmatched, violations,
        whole_gap=potential.singular_at_origin and scheme is not BalanceScheme.FREE_BASIS,
    )
    if violations:
        logger.warning("%s on %s: %d eigenvalues outside %s / %s", scheme, potential.describe(),
                       len(violations), upper, lower)
    return report


def convergence_study(exps: ExponentSet, params: PhysicalParams,
                      potential: PotentialSpec | None = None) -> list[tuple[int, float, float]]:
    """(basis size, lowest positive gap eigenvalue, |error|) for nested kinetic-balance bases
    grown along the ascending exponent ladder."""
    potential = potential or PotentialSpec.point_coulomb(params)
    target = exact_levels(params).level(1)
    rows = []
    for k in range(1, len(exps) + 1):
        basis = kinetic_balance_basis(ExponentSet(f"{exps.name}[:{k}]", exps.values[:k]), params)
        e1 = ground_level(solve_pencil(assemble(basis, potential)))
        rows.append((len(basis), e1, abs(e1 - target)))
    return rows


# --- cross-scheme summary ---
TABLE_COLUMNS = ("bounded V<=0", "bounded V>=0", "coulomb V<=0")

EXPECTED_CLEAN = {
    BalanceScheme.UPPER_LOWER: (False, False, False),
    BalanceScheme.KINETIC_BALANCE: (True, False, False),
    BalanceScheme.ATOMIC_BALANCE: (True, False, True),
    BalanceScheme.DUAL_KINETIC_BALANCE: (True, True, False),
    BalanceScheme.FREE_BASIS: (True, True, True),
}


def pollution_matrix(eps: float = 0.5, params: PhysicalParams | None = None) -> dict[BalanceScheme, tuple[bool, ...]]:
    """Clean (no pollution interval meets the open gap) per scheme and potential class."""
    params = params or PhysicalParams()
    representatives = (
        PotentialSpec.gaussian_well(-0.5, 1.0),
        PotentialSpec.gaussian_well(0.5, 1.0),
        PotentialSpec.point_coulomb(params),
    )
    table = {}
    for scheme in BalanceScheme:
        eps_arg = eps if scheme is BalanceScheme.DUAL_KINETIC_BALANCE else None
        table[scheme] = tuple(
            not any(i.meets_open_gap for i in theorem_intervals(scheme, spec, eps_arg)) for spec in representatives
        )
    return table


def projection_study(base: BasisSet, aux_ladders: list[ExponentSet], potential: PotentialSpec, family, grid,
                     refs, exact: ExactSpectrum,
                     thresholds: Thresholds = Thresholds()) -> list[tuple[int, int, float, float]]:
    """(aux size, flagged trajectories, |E1 error|, free-pencil residual) for free-projected
    bases over growing auxiliary sets."""
    rows = []
    for ladder in aux_ladders:
        aux = kinetic_balance_basis(ladder, base.params)
        projected = free_projected_basis(base, aux)
        trace = classify(sweep(projected, potential, ProjectedTrapFamily(family, aux), grid, refs, exact=exact),
                         exact, thresholds)
        e1 = ground_level(solve_pencil(assemble(projected, potential)))
        residual = free_spectrum(aux).residual_max
        rows.append((len(aux), len(trace.flagged), abs(e1 - exact.level(1)), residual))
        logger.info("aux %d vectors: %d flagged, E1 error %.2e, free residual %.1e", len(aux),
                    len(trace.flagged), rows[-1][2], residual)
    return rows
