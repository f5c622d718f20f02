# Filename: diracgap/errors.py
"""Exception hierarchy. Every error carries the process exit code the CLI reports."""

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2
EXIT_REPRODUCTION = 3


class DiracGapError(Exception):
    exit_code: int = EXIT_NUMERICAL

    def __init__(self, detail: str, exit_code: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


# --- configuration / input ---
class ConfigError(DiracGapError):
    exit_code = EXIT_CONFIG

    def __init__(self, detail: str, key: str | None = None):
        super().__init__(f"{key}: {detail}" if key else detail)
        self.key = key


class ParameterError(ConfigError, ValueError):
    pass


class UnknownNameError(ConfigError, LookupError):
    pass


# --- numerics ---
class NumericalError(DiracGapError):
    exit_code = EXIT_NUMERICAL


class DomainError(NumericalError, ValueError):
    pass


class IntegrabilityError(NumericalError):
    pass


class AccuracyError(NumericalError):
    def __init__(self, detail: str, achieved: float | None = None):
        super().__init__(detail)
        self.achieved = achieved


class UnsupportedOperationError(NumericalError):
    pass


class AssemblyError(NumericalError):
    pass


class DegenerateBasisError(NumericalError):
    pass


class SolverAccuracyError(NumericalError):
    pass


class ConstructionError(NumericalError):
    pass


class ReproductionError(DiracGapError):
    exit_code = EXIT_REPRODUCTION
