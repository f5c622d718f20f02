# Filename: diracgap/utils.py
import logging
import math

from .errors import DomainError, ParameterError

# Exponent window accepted by the term grammar (keeps moments away from overflow)
EXPONENT_MIN = 1e-8
EXPONENT_MAX = 1e12


def ensure_positive(value: float, name: str) -> float:
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    return float(value)


def ensure_in_range(value: float, lo: float, hi: float, name: str, *, lo_open: bool = False) -> float:
    ok = (value > lo if lo_open else value >= lo) and value <= hi
    if not ok:
        bracket = "(" if lo_open else "["
        raise ParameterError(f"{name} must lie in {bracket}{lo}, {hi}], got {value!r}", key=name)
    return float(value)


def ensure_exponent(value: float, name: str = "exponent") -> float:
    if not (EXPONENT_MIN <= value <= EXPONENT_MAX):
        raise DomainError(
            f"{name} {value!r} outside the supported window [{EXPONENT_MIN:g}, {EXPONENT_MAX:g}]"
        )
    return float(value)


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
