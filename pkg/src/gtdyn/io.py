"""Text formats for trajectories, Warren grids, sample dumps and reports.

Floats are written with 17 significant digits so that they parse back
losslessly.  Output CSVs start with their header line; the configuration
that produced them follows the data as ``# config <json>``.
"""
from __future__ import annotations

import io
import json

import numpy as np

from .dynamics import Trajectory
from .errors import FormatError
from .patterns import num_slots, slot_of
from .warren import WarrenTrajectory

__all__ = [
    "fmt_float",
    "trajectory_csv",
    "read_trajectory_csv",
    "grid_csv",
    "samples_csv",
    "read_samples_csv",
    "dump_json",
]

TRAJECTORY_HEADER = "time,level,index,value"
SAMPLES_HEADER = "replica,level,index,value"


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return fmt_float(v)


def _config_footer(config) -> str:
    if config is None:
        return ""
    return "# config " + json.dumps(config, sort_keys=True) + "\n"


def _labels(N):
    return [slot_of(k) for k in range(num_slots(N))]


def trajectory_csv(traj: Trajectory, config: dict | None = None) -> str:
    """Full pattern at t = 0 and after every update."""
    buf = io.StringIO()
    buf.write(TRAJECTORY_HEADER + "\n")
    labels = _labels(traj.N)
    for t, row in zip(traj.times.tolist(), traj.states.tolist()):
        ts = fmt_float(t)
        for (i, j), v in zip(labels, row):
            buf.write(f"{ts},{j},{i},{_fmt_value(v)}\n")
    buf.write(_config_footer(config))
    return buf.getvalue()


def _data_lines(text: str, header: str):
    lines = [l.strip() for l in text.splitlines()]
    lines = [l for l in lines if l and not l.startswith("#")]
    if not lines or lines[0] != header:
        raise FormatError(f"expected header {header!r}", module="cli_io")
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 4:
            raise FormatError(f"data line {lineno}: expected 4 fields", module="cli_io")
        yield lineno, parts


def read_trajectory_csv(text: str) -> Trajectory:
    rows: dict[float, dict] = {}
    N = 0
    for lineno, (t, j, i, v) in _data_lines(text, TRAJECTORY_HEADER):
        try:
            t, j, i, v = float(t), int(j), int(i), int(v)
        except ValueError:
            raise FormatError(f"data line {lineno}: unparsable", module="cli_io") from None
        N = max(N, j)
        rows.setdefault(t, {})[(i, j)] = v
    labels = _labels(N)
    times = sorted(rows)
    try:
        states = [[rows[t][s] for s in labels] for t in times]
    except KeyError as exc:
        raise FormatError(f"incomplete pattern for slot {exc.args[0]}", module="cli_io") from None
    return Trajectory(N, times, np.array(states, np.int64))


def grid_csv(traj: WarrenTrajectory, stride: int = 1, config: dict | None = None) -> str:
    buf = io.StringIO()
    buf.write(TRAJECTORY_HEADER + "\n")
    labels = _labels(traj.N)
    L = traj.values.shape[1]
    idx = list(range(0, L, stride))
    if idx[-1] != L - 1:
        idx.append(L - 1)
    for n in idx:
        ts = fmt_float(n * traj.h)
        for (i, j), v in zip(labels, traj.values[:, n].tolist()):
            buf.write(f"{ts},{j},{i},{fmt_float(v)}\n")
    buf.write(_config_footer(config))
    return buf.getvalue()


def samples_csv(values: np.ndarray, N: int, config: dict | None = None) -> str:
    """One row per (replica, slot); ``values`` has shape (replicas, N(N+1)/2)."""
    buf = io.StringIO()
    buf.write(SAMPLES_HEADER + "\n")
    labels = _labels(N)
    for r, row in enumerate(np.asarray(values).tolist()):
        for (i, j), v in zip(labels, row):
            buf.write(f"{r},{j},{i},{_fmt_value(v)}\n")
    buf.write(_config_footer(config))
    return buf.getvalue()


def read_samples_csv(text: str) -> tuple[int, np.ndarray]:
    """Parse a sample dump; returns (N, array of shape (replicas, N(N+1)/2))."""
    cells: dict[int, dict] = {}
    N = 0
    for lineno, (r, j, i, v) in _data_lines(text, SAMPLES_HEADER):
        try:
            r, j, i, v = int(r), int(j), int(i), float(v)
        except ValueError:
            raise FormatError(f"data line {lineno}: unparsable", module="cli_io") from None
        N = max(N, j)
        cells.setdefault(r, {})[(i, j)] = v
    if not cells:
        raise FormatError("sample dump holds no rows", module="cli_io")
    labels = _labels(N)
    try:
        arr = np.array([[cells[r][s] for s in labels] for r in sorted(cells)])
    except KeyError as exc:
        raise FormatError(f"replica missing slot {exc.args[0]}", module="cli_io") from None
    return N, arr


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
