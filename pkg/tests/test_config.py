from pathlib import Path

import pytest
from pydantic import ValidationError

from diracgap.config import (
    RunConfig,
    Settings,
    dump_run_config,
    load_run_config,
    parse_run_config,
)
from diracgap.errors import EXIT_CONFIG, ConfigError
from diracgap.models import BalanceScheme

SAMPLE = """
# kinetic balance on zinc, contracted trap
physical.z = 30
basis.scheme = kinetic-balance
basis.exponents = 0.5, 2.0, 8.0
trap.kind = contracted
trap.delta = 5000      # contraction ratio
sweep.parameter = delta
sweep.from = 5000
sweep.to = 20000
sweep.steps = 12
output.format = json
"""


class TestSettings:
    def test_defaults(self):
        s = Settings(_env_file=None)
        assert s.app_name == "diracgap"
        assert s.sweep_workers == 1

    def test_environment_override(self, monkeypatch, tmp_path):
        monkeypatch.setenv("DIRACGAP_SWEEP_WORKERS", "3")
        monkeypatch.setenv("DIRACGAP_OUTPUT_DIR", str(tmp_path))
        s = Settings(_env_file=None)
        assert s.sweep_workers == 3
        assert s.output_dir == tmp_path

    def test_rejects_bad_worker_count(self, monkeypatch):
        monkeypatch.setenv("DIRACGAP_SWEEP_WORKERS", "0")
        with pytest.raises(ValidationError):
            Settings(_env_file=None)

    def test_numerics_are_not_environment_settings(self, monkeypatch):
        monkeypatch.setenv("DIRACGAP_QUAD_RTOL", "1e-6")
        s = Settings(_env_file=None)
        assert not hasattr(s, "quad_rtol")
        assert set(Settings.model_fields) == {"app_name", "app_version", "output_dir", "sweep_workers", "log_level"}


class TestParse:
    def test_defaults(self):
        cfg = parse_run_config("")
        assert cfg == RunConfig()
        assert cfg.basis.scheme is BalanceScheme.KINETIC_BALANCE
        assert cfg.basis.exponents == "zn-6-31g"

    def test_sample(self):
        cfg = parse_run_config(SAMPLE)
        assert cfg.basis.exponents == [0.5, 2.0, 8.0]
        assert cfg.trap.kind == "contracted" and cfg.trap.delta == 5000
        assert (cfg.sweep.start, cfg.sweep.to, cfg.sweep.steps) == (5000, 20000, 12)
        assert cfg.output.format == "json"

    def test_overrides_win(self):
        cfg = parse_run_config(SAMPLE, ["basis.scheme = atomic-balance", "sweep.steps=4"])
        assert cfg.basis.scheme is BalanceScheme.ATOMIC_BALANCE
        assert cfg.sweep.steps == 4

    def test_single_exponent_list(self):
        assert parse_run_config("basis.exponents = 3.5,").basis.exponents == [3.5]

    @pytest.mark.parametrize(
        "text, key",
        [
            ("basis.scheme = four-component", "basis.scheme"),
            ("basis.colour = red", "basis.colour"),
            ("nowhere.z = 1", "nowhere.z"),
            ("sweep.steps = 1", "sweep.steps"),
            ("basis.eps = 1.5", "basis.eps"),
        ],
    )
    def test_error_names_the_key(self, text, key):
        with pytest.raises(ConfigError) as info:
            parse_run_config(text)
        assert info.value.key == key
        assert info.value.exit_code == EXIT_CONFIG

    def test_sweep_needs_bounds(self):
        with pytest.raises(ConfigError) as info:
            parse_run_config("sweep.parameter = theta")
        assert info.value.key.startswith("sweep")

    @pytest.mark.parametrize("line", ["basis.scheme", "scheme = kinetic-balance", "a.b.c = 1"])
    def test_malformed_lines(self, line):
        with pytest.raises(ConfigError):
            parse_run_config(line)


class TestRoundTrip:
    def test_dump_and_reparse(self):
        cfg = parse_run_config(SAMPLE, ["physical.alpha = 0.0072973525693", "solver.residual_tolerance = 1e-7"])
        again = parse_run_config(dump_run_config(cfg))
        assert again == cfg

    def test_dump_uses_file_keys(self):
        text = dump_run_config(parse_run_config(SAMPLE))
        assert "sweep.from = 5000.0" in text

    def test_dump_records_numerical_tolerances(self):
        cfg = parse_run_config("solver.quad_rtol = 1e-10\nclassify.drift_floor = 1e-7")
        text = dump_run_config(cfg)
        assert "solver.quad_rtol = 1e-10" in text
        assert "classify.drift_floor = 1e-07" in text
        assert parse_run_config(text) == cfg

    def test_default_dump_carries_quadrature_tolerance(self):
        text = dump_run_config(RunConfig())
        assert "solver.quad_rtol = 1e-12" in text
        assert "basis.exponents = 0.5, 2.0, 8.0" in text

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(SAMPLE, encoding="utf-8")
        assert load_run_config(path) == parse_run_config(SAMPLE)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "absent.cfg")


class TestOutputPath:
    def test_relative_under_output_dir(self, isolated_output):
        cfg = parse_run_config("output.format = json")
        assert cfg.resolve_output("sweep") == isolated_output / "sweep.json"

    def test_configured_relative_path(self, isolated_output):
        cfg = parse_run_config("output.path = runs/zn.csv")
        assert cfg.resolve_output("sweep") == isolated_output / Path("runs/zn.csv")

    def test_absolute_path_kept(self, tmp_path):
        target = tmp_path / "elsewhere.csv"
        cfg = parse_run_config(f"output.path = {target}")
        assert cfg.resolve_output("sweep") == target
