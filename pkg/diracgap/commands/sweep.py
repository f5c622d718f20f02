# Filename: diracgap/commands/sweep.py
import logging

from ..basis import DualBalanceEpsFamily, concentrated_trap, contracted_trap
from ..config import RunConfig
from ..errors import EXIT_OK, ConfigError
from ..models import BalanceScheme
from ..pollution import SweepTrace, classify, sweep
from ..schemas import SweepOut
from ..storage import save_csv, save_json, save_run_config, sweep_rows
from .common import TRAP_PARAMETER, RunContext

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("sweep", help="sweep a trap or basis parameter and classify trajectories")
    p.set_defaults(handler=lambda cfg, args: run_sweep(cfg))


def _eps_sweep(ctx: RunContext) -> SweepTrace:
    if ctx.scheme is not BalanceScheme.DUAL_KINETIC_BALANCE:
        raise ConfigError("an eps sweep needs basis.scheme = dual-kinetic-balance", key="sweep.parameter")
    trap = ctx.cfg.trap
    extra = ()
    if trap.kind == "contracted":
        extra = (contracted_trap(ctx.b, trap.delta),)
    elif trap.kind == "concentrated":
        extra = (concentrated_trap(trap.r0, trap.width_exponent).upper,)
    elif trap.kind == "mixed":
        raise ConfigError("the mixed trap cannot follow an eps sweep", key="trap.kind")
    family = DualBalanceEpsFamily(ctx.exps, ctx.params, extra)
    return sweep(None, ctx.potential, None, ctx.grid(), ctx.refs, exact=ctx.reference, rebuild=family,
                 overlap_threshold=ctx.cfg.solver.overlap_threshold, margin=ctx.cfg.solver.margin)


def sweep_from_config(ctx: RunContext) -> SweepTrace:
    cfg = ctx.cfg
    parameter = cfg.sweep.parameter
    if parameter == "none":
        raise ConfigError("nothing to sweep", key="sweep.parameter")
    if parameter == "eps":
        trace = _eps_sweep(ctx)
    else:
        if cfg.trap.kind == "none" or TRAP_PARAMETER[cfg.trap.kind] != parameter:
            raise ConfigError(f"sweeping {parameter} needs the matching trap kind", key="trap.kind")
        trace = sweep(ctx.basis, ctx.potential, ctx.trap_family(), ctx.grid(), ctx.refs, exact=ctx.reference,
                      overlap_threshold=cfg.solver.overlap_threshold, margin=cfg.solver.margin)
    return classify(trace, ctx.reference, ctx.thresholds)


def write_trace(cfg: RunConfig, trace: SweepTrace, stem: str) -> str:
    out = cfg.resolve_output(stem)
    if cfg.output.format == "json":
        save_json(SweepOut.from_trace(trace), out)
    else:
        header, rows = sweep_rows(trace)
        save_csv(header, rows, out)
    save_run_config(cfg, out)
    return str(out)


def print_summary(trace: SweepTrace) -> None:
    print(f"{len(trace.trajectories)} gap trajectories over {trace.parameter} ({trace.grid.size} points)")
    for k, t in enumerate(trace.trajectories):
        verdict = "SPURIOUS" if t.spurious else "ok"
        print(f"  traj_{k}: drift {t.drift:.3e}, reference distance {t.oracle_distance:.3e}, "
              f"final overlap {t.final_overlap:.3e} -> {verdict} {list(t.criteria)}")
    for w in trace.warnings:
        print(f"  warning: {w}")


def run_sweep(cfg: RunConfig) -> int:
    ctx = RunContext(cfg)
    trace = sweep_from_config(ctx)
    print_summary(trace)
    write_trace(cfg, trace, "sweep")
    return EXIT_OK
