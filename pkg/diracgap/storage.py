# Filename: diracgap/storage.py
import csv
import hashlib
import io
import logging
import math
import os
import tempfile
from pathlib import Path

from pydantic import BaseModel

from .config import RunConfig, dump_run_config

logger = logging.getLogger(__name__)


def save_bytes(data: bytes, dest: Path) -> tuple[int, str, str]:
    """
    Write data next to dest and rename it into place. Returns tuple(size_bytes, sha256_hex, filepath).
    """
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=dest.parent, prefix=f".{dest.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as out_file:
            out_file.write(data)
        os.replace(tmp_name, dest)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    sha256_hex = hashlib.sha256(data).hexdigest()
    logger.info("wrote %s (%d bytes, sha256 %s)", dest, len(data), sha256_hex[:16])
    return len(data), sha256_hex, str(dest)


def format_number(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int,)):
        return str(value)
    value = float(value)
    return "" if math.isnan(value) else "%.12g" % value


def save_csv(header: list[str], rows, dest: Path) -> tuple[int, str, str]:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([cell if isinstance(cell, str) else format_number(cell) for cell in row])
    return save_bytes(buf.getvalue().encode("utf-8"), dest)


def save_json(document: BaseModel, dest: Path) -> tuple[int, str, str]:
    return save_bytes(document.model_dump_json(indent=2).encode("utf-8"), dest)


def save_run_config(cfg: RunConfig, output: Path) -> tuple[int, str, str]:
    """The resolved configuration, written as <output>.cfg so the run can be replayed."""
    output = Path(output)
    return save_bytes(dump_run_config(cfg).encode("utf-8"), output.with_name(output.name + ".cfg"))


def sweep_rows(trace) -> tuple[list[str], list[list]]:
    """One row per grid point: parameter, one column per trajectory, then the verdict block."""
    m = len(trace.trajectories)
    header = [trace.parameter] + [f"traj_{k}" for k in range(m)] + [f"spurious_{k}" for k in range(m)]
    verdicts = [bool(t.spurious) for t in trace.trajectories]
    rows = []
    for p, value in enumerate(trace.grid):
        rows.append([value] + [t.values[p] for t in trace.trajectories] + verdicts)
    return header, rows
