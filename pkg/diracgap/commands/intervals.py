# Filename: diracgap/commands/intervals.py
from ..assembly import append_vectors, assemble
from ..config import RunConfig
from ..eigensolve import solve_pencil
from ..errors import EXIT_OK, ReproductionError
from ..pollution import check_theorem_intervals
from ..schemas import IntervalReportOut
from ..storage import save_json, save_run_config
from .common import RunContext


def register(subparsers) -> None:
    p = subparsers.add_parser("check-intervals", help="check unmatched gap eigenvalues against the pollution intervals")
    p.set_defaults(handler=lambda cfg, args: run_check_intervals(cfg))


def run_check_intervals(cfg: RunConfig) -> int:
    ctx = RunContext(cfg)
    pencil = assemble(ctx.basis, ctx.potential)
    family = ctx.trap_family()
    if family is not None:
        pencil = append_vectors(pencil, ctx.potential, family(ctx.trap_value()))
    result = solve_pencil(pencil, cfg.solver.overlap_threshold, cfg.solver.residual_tolerance)
    report = check_theorem_intervals(
        result, ctx.scheme, ctx.potential, ctx.eps, reference=ctx.reference,
        oracle_tol=cfg.classify.oracle_tol, margin=max(cfg.solver.margin, 1e-6),
    )

    print(f"{ctx.scheme} on {ctx.potential.describe()}: upper {report.upper}, lower {report.lower}")
    if report.whole_gap:
        print("  Coulomb singularity: the attractive interval is the whole gap")
    print(f"  unmatched gap eigenvalues: {[round(e, 9) for e in report.unmatched]}")
    if report.violations:
        print(f"  OUTSIDE the intervals: {[round(e, 9) for e in report.violations]}")

    out = cfg.resolve_output("intervals").with_suffix(".json")
    save_json(IntervalReportOut.from_report(report), out)
    save_run_config(cfg, out)
    if not report.compliant:
        raise ReproductionError(f"{len(report.violations)} eigenvalues outside the pollution intervals")
    return EXIT_OK
