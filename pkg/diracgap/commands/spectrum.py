# Filename: diracgap/commands/spectrum.py
import logging

from ..assembly import append_vectors, assemble
from ..config import RunConfig
from ..eigensolve import gap_eigenvalues, solve_pencil
from ..errors import EXIT_OK
from ..schemas import PencilOut, SpectrumOut
from ..storage import save_csv, save_json, save_run_config
from .common import RunContext

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("spectrum", help="solve one pencil and list its gap eigenvalues")
    p.set_defaults(handler=lambda cfg, args: run_spectrum(cfg))


def run_spectrum(cfg: RunConfig) -> int:
    """
    Build the basis (plus the configured trap at its configured value), assemble, solve, write output.
    """
    ctx = RunContext(cfg)
    pencil = assemble(ctx.basis, ctx.potential)
    family = ctx.trap_family()
    if family is not None:
        pencil = append_vectors(pencil, ctx.potential, family(ctx.trap_value()))
    result = solve_pencil(pencil, cfg.solver.overlap_threshold, cfg.solver.residual_tolerance)
    gap = gap_eigenvalues(result, cfg.solver.margin)
    reference = ctx.reference

    print(f"{ctx.scheme} basis, {pencil.dim} vectors, {ctx.potential.describe()}")
    print(f"dropped overlap directions: {result.n_discarded}, S condition {result.s_condition:.3e}")
    if not gap:
        print("no eigenvalues in the gap")
    for i, e in gap:
        dist = reference.distance(e)
        note = f"  (nearest reference level {dist:.3e} away)" if reference.levels else ""
        print(f"  lambda[{i}] = {e:.9f}{note}")

    out = cfg.resolve_output("spectrum")
    document = SpectrumOut.from_result(result, gap, reference)
    if cfg.output.format == "json":
        save_json(document, out)
    else:
        gap_index = {i for i, _ in gap}
        rows = [
            [i, float(e), i in gap_index, reference.distance(float(e)) if reference.levels else None]
            for i, e in enumerate(result.eigenvalues)
        ]
        save_csv(["index", "eigenvalue", "in_gap", "reference_distance"], rows, out)
    if cfg.output.pencil:
        dump = out.with_name(out.name + ".pencil.json")
        save_json(PencilOut.from_pencil(pencil), dump)
        logger.info("pencil written to %s", dump)
    save_run_config(cfg, out)
    return EXIT_OK
