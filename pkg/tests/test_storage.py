import hashlib
import json
import math

import numpy as np
import pytest

from diracgap.config import parse_run_config
from diracgap.pollution import SweepTrace, Trajectory
from diracgap.schemas import SweepOut
from diracgap.storage import format_number, save_bytes, save_csv, save_json, save_run_config, sweep_rows


def _trace():
    grid = np.array([0.1, 0.2, 0.3])
    trajectories = [
        Trajectory(np.array([0.5, 0.51, math.nan]), np.array([0.9, 0.8, math.nan]), spurious=False),
        Trajectory(np.array([math.nan, 0.7, 0.9]), np.array([math.nan, 0.2, 0.01]), spurious=True,
                   criteria=("drift", "overlap")),
    ]
    return SweepTrace("theta", grid, trajectories, classified=True)


class TestSaveBytes:
    def test_size_and_hash(self, tmp_path):
        size, digest, path = save_bytes(b"pencil", tmp_path / "nested" / "out.bin")
        assert size == 6
        assert digest == hashlib.sha256(b"pencil").hexdigest()
        assert (tmp_path / "nested" / "out.bin").read_bytes() == b"pencil"
        assert path.endswith("out.bin")

    def test_replaces_and_leaves_no_temp(self, tmp_path):
        dest = tmp_path / "out.bin"
        save_bytes(b"first", dest)
        save_bytes(b"second", dest)
        assert dest.read_bytes() == b"second"
        assert [p.name for p in tmp_path.iterdir()] == ["out.bin"]


class TestFormat:
    @pytest.mark.parametrize(
        "value, text",
        [
            (math.nan, ""),
            (None, ""),
            (True, "1"),
            (7, "7"),
            (0.975729123456789, "0.975729123457"),
            (np.float64(1e-12), "1e-12"),
        ],
    )
    def test_numbers(self, value, text):
        assert format_number(value) == text


class TestCsv:
    def test_sweep_rows(self):
        header, rows = sweep_rows(_trace())
        assert header == ["theta", "traj_0", "traj_1", "spurious_0", "spurious_1"]
        assert len(rows) == 3
        assert rows[0][-2:] == [False, True]

    def test_nan_is_empty_cell(self, tmp_path):
        header, rows = sweep_rows(_trace())
        dest = tmp_path / "sweep.csv"
        save_csv(header, rows, dest)
        lines = dest.read_text().splitlines()
        assert lines[0] == "theta,traj_0,traj_1,spurious_0,spurious_1"
        assert lines[1] == "0.1,0.5,,0,1"
        assert len(lines) == 4

    def test_deterministic(self, tmp_path):
        header, rows = sweep_rows(_trace())
        _, first, _ = save_csv(header, rows, tmp_path / "a.csv")
        _, second, _ = save_csv(header, rows, tmp_path / "b.csv")
        assert first == second


class TestJson:
    def test_sweep_document(self, tmp_path):
        dest = tmp_path / "sweep.json"
        save_json(SweepOut.from_trace(_trace()), dest)
        doc = json.loads(dest.read_text())
        assert doc["parameter"] == "theta"
        assert doc["trajectories"][0]["values"][2] is None
        assert doc["trajectories"][1]["spurious"] is True


class TestRunConfigCopy:
    def test_written_next_to_output(self, tmp_path):
        cfg = parse_run_config("basis.scheme = upper-lower")
        save_run_config(cfg, tmp_path / "spectrum.json")
        replay = (tmp_path / "spectrum.json.cfg").read_text()
        assert parse_run_config(replay) == cfg
