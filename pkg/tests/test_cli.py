import csv
import json

import numpy as np
import pytest

from diracgap.cli import build_parser, main
from diracgap.eigensolve import solve_pencil
from diracgap.errors import EXIT_CONFIG, EXIT_OK
from diracgap.radial import quadrature_rtol
from diracgap.schemas import PencilOut

SMALL = ["-s", "basis.exponents=0.5,2.0,8.0,32.0"]


class TestParser:
    def test_subcommands(self):
        parser = build_parser()
        for command in ("spectrum", "sweep", "check-intervals"):
            assert parser.parse_args([command]).command == command
        assert parser.parse_args(["reproduce", "ground"]).name == "ground"

    def test_repeatable_overrides(self):
        args = build_parser().parse_args(["-s", "basis.eps=0.5", "--set", "basis.scheme=upper-lower", "spectrum"])
        assert args.overrides == ["basis.eps=0.5", "basis.scheme=upper-lower"]

    def test_unknown_scenario(self):
        with pytest.raises(SystemExit) as info:
            main(["reproduce", "fig9"])
        assert info.value.code == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0
        assert "diracgap" in capsys.readouterr().out


class TestExitCodes:
    def test_invalid_scheme(self, caplog):
        assert main(["-s", "basis.scheme=bogus", "spectrum"]) == EXIT_CONFIG
        assert "basis.scheme" in caplog.text

    def test_missing_config_file(self, tmp_path):
        assert main(["-c", str(tmp_path / "absent.cfg"), "spectrum"]) == EXIT_CONFIG

    def test_sweep_without_bounds(self):
        assert main(["-s", "sweep.parameter=theta", "-s", "trap.kind=mixed", "sweep"]) == EXIT_CONFIG

    def test_sweep_parameter_must_match_trap(self):
        args = ["-s", "sweep.parameter=theta", "-s", "sweep.from=0.1", "-s", "sweep.to=1", "-s", "trap.kind=contracted"]
        assert main([*SMALL, *args, "sweep"]) == EXIT_CONFIG

    def test_mixed_trap_cannot_be_balanced(self):
        args = ["-s", "trap.kind=mixed", "-s", "trap.inject=balanced"]
        assert main([*SMALL, *args, "spectrum"]) == EXIT_CONFIG


class TestCommands:
    def test_summary_table(self, capsys):
        assert main(["reproduce", "table2"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "free-basis" in out and "polluted" in out

    def test_free_operator_spectrum(self, capsys, isolated_output):
        args = ["-s", "potential.type=zero", "-s", "basis.scheme=upper-lower", "-s", "solver.margin=1e-6"]
        assert main([*args, "spectrum"]) == EXIT_OK
        assert "no eigenvalues in the gap" in capsys.readouterr().out
        assert (isolated_output / "spectrum.csv").exists()
        assert (isolated_output / "spectrum.csv.cfg").exists()

    def test_spectrum_json(self, isolated_output):
        args = ["-s", "basis.scheme=kinetic-balance", "-s", "output.format=json"]
        assert main([*SMALL, *args, "spectrum"]) == EXIT_OK
        doc = json.loads((isolated_output / "spectrum.json").read_text())
        assert len(doc["eigenvalues"]) == 8
        assert doc["residual_max"] >= 0.0

    def test_spectrum_pencil_dump(self, isolated_output):
        args = ["-s", "basis.scheme=kinetic-balance", "-s", "output.pencil=true"]
        assert main([*SMALL, *args, "spectrum"]) == EXIT_OK
        doc = PencilOut.model_validate_json((isolated_output / "spectrum.csv.pencil.json").read_text())
        assert doc.dim == 8 and len(doc.meta.labels) == 8
        assert doc.meta.potential.startswith("point-coulomb")
        h, s = doc.matrices()
        np.testing.assert_allclose(h, h.T, atol=0)
        np.testing.assert_allclose(np.diag(s), 1.0, rtol=1e-12)
        with open(isolated_output / "spectrum.csv", newline="") as fh:
            listed = [float(row["eigenvalue"]) for row in csv.DictReader(fh)]
        np.testing.assert_allclose(solve_pencil(doc).eigenvalues, listed, rtol=1e-9, atol=1e-12)

    def test_pencil_dump_is_opt_in(self, isolated_output):
        assert main([*SMALL, "-s", "basis.scheme=kinetic-balance", "spectrum"]) == EXIT_OK
        assert not (isolated_output / "spectrum.csv.pencil.json").exists()
        assert "output.pencil = False" in (isolated_output / "spectrum.csv.cfg").read_text()

    def test_quadrature_tolerance_comes_from_config(self, isolated_output):
        args = ["-s", "basis.scheme=atomic-balance", "-s", "solver.quad_rtol=1e-10"]
        assert main([*SMALL, *args, "spectrum"]) == EXIT_OK
        assert quadrature_rtol() == 1e-10
        assert "solver.quad_rtol = 1e-10" in (isolated_output / "spectrum.csv.cfg").read_text()

    def test_sweep_replays_identically(self, isolated_output):
        args = ["-s", "trap.kind=mixed", "-s", "trap.b_reduced=5", "-s", "sweep.parameter=theta",
                "-s", "sweep.from=0.1", "-s", "sweep.to=1.4", "-s", "sweep.steps=3"]
        assert main([*SMALL, *args, "sweep"]) == EXIT_OK
        first = (isolated_output / "sweep.csv").read_bytes()
        assert len(first.decode().splitlines()) == 4
        replay = isolated_output / "replay.cfg"
        replay.write_bytes((isolated_output / "sweep.csv.cfg").read_bytes())
        assert main(["-c", str(replay), "sweep"]) == EXIT_OK
        assert (isolated_output / "sweep.csv").read_bytes() == first

    def test_eps_sweep(self, isolated_output):
        args = ["-s", "basis.scheme=dual-kinetic-balance", "-s", "potential.type=gaussian-well",
                "-s", "sweep.parameter=eps", "-s", "sweep.from=0.4", "-s", "sweep.to=1.0", "-s", "sweep.steps=3"]
        assert main([*SMALL, *args, "sweep"]) == EXIT_OK
        assert (isolated_output / "sweep.csv").exists()

    def test_check_intervals_report(self, isolated_output):
        args = ["-s", "basis.scheme=kinetic-balance", "-s", "potential.type=gaussian-well"]
        assert main([*SMALL, *args, "check-intervals"]) == EXIT_OK
        doc = json.loads((isolated_output / "intervals.json").read_text())
        assert doc["compliant"] is True
