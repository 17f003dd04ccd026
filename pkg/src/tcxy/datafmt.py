"""Deterministic CSV and JSON writers for trajectories, sweeps, and figures.

CSV files carry a single header row and full double precision (17 significant
digits); JSON files carry a metadata object plus columnar arrays.  Identical
configurations produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .runner import FigureResult, SweepResult, TrajectoryResult

FORMATS = ("csv", "json", "both")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _write_rows(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            cell if isinstance(cell, str) else format_float(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _json_payload(metadata: dict, header: list[str], columns: list) -> str:
    payload = {
        "metadata": metadata,
        "columns": {
            name: [v if isinstance(v, str) else float(v) for v in col]
            for name, col in zip(header, columns)
        },
    }
    return json.dumps(payload, indent=2) + "\n"


def trajectory_table(result: TrajectoryResult) -> tuple[list[str], list[np.ndarray]]:
    header = ["tau"] + list(result.columns)
    columns = [result.taus] + [result.columns[name] for name in result.columns]
    return header, columns


def sweep_table(result: SweepResult) -> tuple[list[str], list]:
    """Long-format table keyed by (axis value, tau); failed entries are skipped."""
    header: list[str] | None = None
    chunks: list[list] = []
    for entry in result.entries:
        if entry.result is None:
            continue
        traj_header, traj_columns = trajectory_table(entry.result)
        if header is None:
            header = [result.axis] + traj_header
            chunks = [[] for _ in header]
        chunks[0].append(np.full(entry.result.taus.size, entry.value))
        for i, col in enumerate(traj_columns, start=1):
            chunks[i].append(col)
    if header is None:
        raise ConfigError("sweep produced no successful entries to write")
    return header, [np.concatenate(c) for c in chunks]


def figure_table(result: FigureResult) -> tuple[list[str], list]:
    header: list[str] | None = None
    chunks: list[list] = []
    for panel, curve, traj in result.runs:
        traj_header, traj_columns = trajectory_table(traj)
        if header is None:
            header = ["panel", "curve"] + traj_header
            chunks = [[] for _ in header]
        npts = traj.taus.size
        chunks[0].append([panel] * npts)
        chunks[1].append([curve] * npts)
        for i, col in enumerate(traj_columns, start=2):
            chunks[i].append(col)
    if header is None:
        raise ConfigError("figure produced no datasets")
    merged = []
    for i, chunk in enumerate(chunks):
        if i < 2:
            merged.append([v for part in chunk for v in part])
        else:
            merged.append(np.concatenate(chunk))
    return header, merged


def write_table(base_path, fmt: str, metadata: dict, header: list[str],
                columns: list) -> list[Path]:
    """Write one logical table as CSV, JSON, or both; returns written paths."""
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {fmt!r}")
    base = Path(base_path)
    if base.suffix in (".csv", ".json"):
        base = base.with_suffix("")
    written = []
    n_rows = len(columns[0])
    if any(len(col) != n_rows for col in columns):
        raise ConfigError("all columns must have equal length")
    if fmt in ("csv", "both"):
        path = base.with_suffix(".csv")
        _write_rows(path, header, zip(*columns))
        written.append(path)
    if fmt in ("json", "both"):
        path = base.with_suffix(".json")
        path.write_text(_json_payload(metadata, header, columns), encoding="utf-8")
        written.append(path)
    return written
