# Filename: diracgap/config.py
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError
from .models import DEFAULT_ALPHA, BalanceScheme


class Settings(BaseSettings):
    # Core
    app_name: str = "diracgap"
    app_version: str = "0.1.0"

    output_dir: Path = Path("./data")
    sweep_workers: int = Field(default=1, ge=1, description="processes used for sweep grid points")

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"

    model_config = SettingsConfigDict(
        env_prefix="DIRACGAP_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


settings = Settings()


# --- run configuration (dotted-key files) ---
class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class PhysicalSection(_Section):
    alpha: float = Field(default=DEFAULT_ALPHA, gt=0)
    z: float = Field(default=30.0, ge=0)


class PotentialSection(_Section):
    type: Literal["point-coulomb", "gaussian-well", "zero"] = "point-coulomb"
    depth: float = -0.5
    width: float = Field(default=1.0, gt=0)


class BasisSection(_Section):
    scheme: BalanceScheme = BalanceScheme.KINETIC_BALANCE
    exponents: list[float] | str = "zn-6-31g"
    eps: float = Field(default=1.0, gt=0, le=1)
    # free-basis only: states kept per branch (defaults to the exponent count)
    n_keep: int | None = Field(default=None, ge=1)


class TrapSection(_Section):
    kind: Literal["mixed", "contracted", "concentrated", "none"] = "none"
    theta: float = 0.5
    b_reduced: float = Field(default=1e6, gt=0)
    delta: float = Field(default=1e4, gt=1)
    r0: float = Field(default=0.7147, gt=0)
    width_exponent: float = Field(default=400.0, gt=0)
    inject: Literal["raw", "balanced", "projected"] = "raw"


class SweepSection(_Section):
    parameter: Literal["theta", "delta", "eps", "width_exponent", "none"] = "none"
    start: float | None = Field(default=None, alias="from")
    to: float | None = None
    steps: int = Field(default=60, ge=2)


class SolverSection(_Section):
    overlap_threshold: float = Field(default=1e-10, gt=0, lt=1)
    residual_tolerance: float | None = Field(default=None, gt=0)
    margin: float = Field(default=0.0, ge=0, lt=1)
    quad_rtol: float = Field(default=1e-12, gt=0, lt=1e-3)


class ClassifySection(_Section):
    drift_factor: float = Field(default=10.0, gt=0)
    oracle_tol: float = Field(default=1e-3, gt=0)
    overlap_tol: float = Field(default=0.05, gt=0)
    drift_floor: float = Field(default=1e-6, ge=0)
    n_refs: int = Field(default=10, ge=1)


class OutputSection(_Section):
    format: Literal["csv", "json"] = "csv"
    path: Path | None = None
    # spectrum only: also write the assembled pencil to <output>.pencil.json
    pencil: bool = False


class RunConfig(_Section):
    physical: PhysicalSection = PhysicalSection()
    potential: PotentialSection = PotentialSection()
    basis: BasisSection = BasisSection()
    trap: TrapSection = TrapSection()
    sweep: SweepSection = SweepSection()
    solver: SolverSection = SolverSection()
    classify: ClassifySection = ClassifySection()
    output: OutputSection = OutputSection()

    @field_validator("sweep")
    @classmethod
    def _sweep_bounds(cls, v: SweepSection) -> SweepSection:
        if v.parameter != "none" and (v.start is None or v.to is None):
            raise ValueError("a sweep needs both sweep.from and sweep.to")
        return v

    def resolve_output(self, stem: str) -> Path:
        """Output file; relative paths live under settings.output_dir."""
        path = self.output.path or Path(f"{stem}.{self.output.format}")
        return path if path.is_absolute() else settings.output_dir / path


def _split_value(raw: str):
    raw = raw.strip()
    if "," in raw:
        return [item.strip() for item in raw.split(",") if item.strip()]
    return raw


def _parse_pairs(lines, source: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.count(".") != 1:
            raise ConfigError(f"{source}:{lineno}: keys are 'section.field'", key=key)
        pairs.append((key, value))
    return pairs


def build_run_config(pairs: list[tuple[str, str]]) -> RunConfig:
    tree: dict[str, dict] = {}
    for key, value in pairs:
        section, name = key.split(".")
        if section not in RunConfig.model_fields:
            raise ConfigError("unknown section", key=key)
        tree.setdefault(section, {})[name] = _split_value(value)
    try:
        return RunConfig.model_validate(tree)
    except ValidationError as exc:
        err = exc.errors()[0]
        key = ".".join(str(part) for part in err["loc"][:2])
        raise ConfigError(err["msg"], key=key) from exc


def parse_run_config(text: str, overrides: list[str] | None = None, source: str = "<config>") -> RunConfig:
    pairs = _parse_pairs(text.splitlines(), source)
    pairs += _parse_pairs(overrides or [], "--set")
    return build_run_config(pairs)


def load_run_config(path: Path | None, overrides: list[str] | None = None) -> RunConfig:
    if path is None:
        return parse_run_config("", overrides)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}", key=str(path)) from exc
    return parse_run_config(text, overrides, source=str(path))


def _format_value(value) -> str:
    if isinstance(value, list):
        return ", ".join(repr(float(v)) for v in value) + ("," if len(value) == 1 else "")
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_run_config(cfg: RunConfig) -> str:
    lines = []
    for section, body in cfg.model_dump(mode="json", by_alias=True).items():
        for name, value in body.items():
            if value is None:
                continue
            lines.append(f"{section}.{name} = {_format_value(value)}")
    return "\n".join(lines) + "\n"
