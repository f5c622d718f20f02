# Filename: diracgap/cli.py
import argparse
import logging
from pathlib import Path

from pydantic import ValidationError

from .commands import COMMANDS
from .config import load_run_config, settings
from .errors import EXIT_CONFIG, DiracGapError
from .radial import set_quadrature_rtol
from .utils import configure_logging

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Spectral pollution in Gaussian-basis discretizations of the radial Dirac-Coulomb operator.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.app_version}")
    parser.add_argument("-c", "--config", type=Path, default=None, help="dotted-key run configuration file")
    parser.add_argument(
        "-s", "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override one configuration key (repeatable), e.g. --set basis.scheme=kinetic-balance",
    )
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default=settings.log_level)
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        cfg = load_run_config(args.config, args.overrides)
        set_quadrature_rtol(cfg.solver.quad_rtol)
        return args.handler(cfg, args)
    except ValidationError as exc:
        err = exc.errors()[0]
        logger.error("invalid input %s: %s", ".".join(str(p) for p in err["loc"]) or exc.title, err["msg"])
        return EXIT_CONFIG
    except DiracGapError as exc:
        logger.error("%s: %s", type(exc).__name__, exc.detail)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
