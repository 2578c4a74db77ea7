"""Run configuration: flat JSON file plus flag overrides (flags win).

Angles are degrees in config files and on the command line, radians
internally.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

from .kinematics import GameParams

_FORMATS = ("csv", "json")


@dataclass
class Config:
    phi_d_degrees: float = 40.0
    tau_max: float = 2.0 * math.pi
    dt: float = 1e-4
    tol_root: float = 1e-10
    tol_event: float = 1e-9
    scan_dtau: float = 1e-3
    sample_dtau: float = 5e-3
    n_theta: int = 24
    n_r: int = 6
    output_dir: str = "out"
    format: str = "csv"

    def __post_init__(self):
        if not 0.0 < self.phi_d_degrees < 90.0:
            raise ValueError(
                f"phi_d_degrees must lie in (0, 90), got {self.phi_d_degrees}")
        for name in ("tau_max", "dt", "tol_root", "tol_event",
                     "scan_dtau", "sample_dtau"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.n_theta < 0 or self.n_r < 0:
            raise ValueError("seed grid sizes must be >= 0")
        if self.format not in _FORMATS:
            raise ValueError(f"format must be one of {_FORMATS}")

    def game_params(self) -> GameParams:
        return GameParams(phi_d=math.radians(self.phi_d_degrees),
                          tol_root=self.tol_root, tol_event=self.tol_event,
                          tau_max=self.tau_max, scan_dtau=self.scan_dtau)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["seed_grid"] = {"n_theta": d.pop("n_theta"), "n_r": d.pop("n_r")}
        return d

    def sha256(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


def load_config(path=None, overrides: dict | None = None) -> Config:
    """Build a Config from an optional JSON file and flag overrides."""
    data: dict = {}
    if path is not None:
        raw = json.loads(Path(path).read_text())
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        data.update(raw)
    grid = data.pop("seed_grid", None)
    if grid is not None:
        data["n_theta"] = grid.get("n_theta", Config.n_theta)
        data["n_r"] = grid.get("n_r", Config.n_r)
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    known = {f.name for f in fields(Config)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return Config(**data)
