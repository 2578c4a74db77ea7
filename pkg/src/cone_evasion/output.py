"""Deterministic CSV/JSON writers and the run manifest.

Every file embeds the producing config's SHA-256 so downstream consumers
can refuse mixed-provenance inputs.  Floats are written with %.17g
(shortest exact round-trip width), so identical configs produce
byte-identical output.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .synthesis import Trajectory

TRAJECTORY_COLUMNS = ("tau", "r", "phi", "theta", "x", "y", "lambda_x",
                      "lambda_y", "lambda_theta", "nu_p", "nu_e", "family")


def fmt(v) -> str:
    return "%.17g" % float(v)


def _config_line(config_sha: str) -> str:
    return f"# config_sha256={config_sha}\n"


def trajectory_rows(traj: Trajectory, sample_dtau: float):
    """Row tuples for export: per segment, taus at sample_dtau plus the cut."""
    rows = []
    for seg in traj.segments:
        span = seg.tau_end - seg.anchor_tau
        n = max(1, int(math.ceil(span / sample_dtau - 1e-12)))
        taus = seg.anchor_tau + (span / n) * np.arange(n + 1)
        x, y, theta = seg.reduced_arrays(taus)
        lam_x, lam_y, lam_th = seg.costate_arrays(taus)
        r = np.hypot(x, y)
        phi = np.arctan2(x, y)
        for i, tau in enumerate(taus):
            rows.append((tau, r[i], phi[i], theta[i], x[i], y[i], lam_x[i],
                         lam_y[i], lam_th[i], seg.nu_p, seg.nu_e,
                         seg.family.value))
    return rows


def write_trajectory(path, traj: Trajectory, config_sha: str,
                     sample_dtau: float, fmt_kind: str = "csv") -> int:
    """Write one trajectory file; returns the number of data rows."""
    rows = trajectory_rows(traj, sample_dtau)
    path = Path(path)
    if fmt_kind == "csv":
        lines = [_config_line(config_sha), ",".join(TRAJECTORY_COLUMNS) + "\n"]
        for row in rows:
            lines.append(",".join([*(fmt(v) for v in row[:-1]), row[-1]]) + "\n")
        path.write_text("".join(lines))
    else:
        payload = {
            "config_sha256": config_sha,
            "columns": list(TRAJECTORY_COLUMNS),
            "rows": [[*(float(v) for v in row[:-1]), row[-1]] for row in rows],
        }
        path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    return len(rows)


def read_table(path):
    """Read a CSV/JSON table written by this module.

    Returns (config_sha, columns, rows) with numeric fields as floats and
    the trailing non-numeric fields kept as strings.
    """
    path = Path(path)
    if path.suffix == ".json":
        payload = json.loads(path.read_text())
        return payload["config_sha256"], payload["columns"], payload["rows"]
    sha = None
    columns = None
    rows = []
    with path.open() as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                if "config_sha256=" in line:
                    sha = line.split("config_sha256=", 1)[1].strip()
                continue
            if columns is None:
                columns = line.split(",")
                continue
            if not line:
                continue
            parsed = []
            for cell in line.split(","):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    parsed.append(cell)
            rows.append(parsed)
    if columns is None:
        raise ValueError(f"{path}: no header row")
    return sha, columns, rows


def write_table(path, columns, rows, config_sha: str,
                fmt_kind: str = "csv") -> int:
    """Write a generic table with the fixed float formatting."""
    path = Path(path)
    if fmt_kind == "csv":
        lines = [_config_line(config_sha), ",".join(columns) + "\n"]
        for row in rows:
            cells = [c if isinstance(c, str) else fmt(c) for c in row]
            lines.append(",".join(cells) + "\n")
        path.write_text("".join(lines))
    else:
        payload = {"config_sha256": config_sha, "columns": list(columns),
                   "rows": [[c if isinstance(c, str) else float(c)
                             for c in row] for row in rows]}
        path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    return len(rows)


def write_manifest(path, config_dict: dict, config_sha: str, entries) -> None:
    """Manifest of produced files with provenance and row counts."""
    payload = {
        "config": config_dict,
        "config_sha256": config_sha,
        "files": list(entries),
    }
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
