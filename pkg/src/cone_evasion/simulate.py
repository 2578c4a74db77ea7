"""Forward-time replay of synthesized play in the realistic plane.

A synthesized trajectory lives in retro time tau; replay runs it forward
(t = total_tau - tau).  Both players are integrated numerically in the
realistic plane under the reversed control schedule, while the reduced
closed form provides the ground truth for cross-checks and the escape
flag.  Fixed-step RK4 with step splitting at control switches keeps the
integration fourth-order across the bang-bang discontinuities.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ScenarioError
from .kinematics import (Controls, GameParams, from_reduced, realistic_rhs,
                         retro_reduced_rhs, to_cylindrical)
from .synthesis import EusBranch, Trajectory, synthesize
from .terminal import BoundarySide, Seed, SeedKind

_DEFAULT_PURSUER_POSE = (0.0, 0.0, 0.5 * math.pi)


@dataclass(frozen=True)
class Scenario:
    """A replayable game instance: seed, optional EUS branch, integration knobs.

    The default pursuer start pose (origin, heading pi/2) makes the
    realistic frame coincide with the reduced frame at t = 0.
    """

    params: GameParams
    seed: Seed
    branch: Optional[EusBranch] = None
    pursuer_start_pose: tuple = _DEFAULT_PURSUER_POSE
    dt: float = 1e-4
    description: str = ""

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ScenarioError("dt must be positive")


@dataclass
class SimResult:
    """Sampled forward-time play and its outcome."""

    times: np.ndarray            # (n,)
    pursuer_path: np.ndarray     # (n, 3) poses
    evader_path: np.ndarray      # (n, 3) poses
    reduced_path: np.ndarray     # (n, 3) closed-form reduced states
    control_log: np.ndarray      # (n, 2) applied (nu_p, nu_e)
    escape_time: float
    escaped: bool
    trajectory: Trajectory = field(repr=False, default=None)


def rk4_integrate(dynamics, state, controls_schedule, t_span, dt):
    """Classic fixed-step RK4 with piecewise-constant controls.

    ``dynamics(state_array, controls) -> derivative array``;
    ``controls_schedule`` is a sequence of (t_start, Controls) with
    non-decreasing t_start, the first at or before t_span[0].  Steps are
    split so none straddles a schedule breakpoint.  Returns (times,
    states) including both endpoints.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if dt <= 0.0 or t1 < t0:
        raise ValueError("rk4_integrate: need dt > 0 and t1 >= t0")
    schedule = sorted(controls_schedule, key=lambda e: e[0])
    if not schedule or schedule[0][0] > t0 + 1e-12:
        raise ValueError("rk4_integrate: schedule must cover t_span[0]")
    breaks = sorted({t for t, _ in schedule if t0 < t < t1} | {t1})

    def controls_at(t):
        u = schedule[0][1]
        for ts, uk in schedule:
            if ts <= t + 1e-15:
                u = uk
            else:
                break
        return u

    y = np.asarray(state, dtype=float).copy()
    times = [t0]
    states = [y.copy()]
    t = t0
    for t_stop in breaks:
        u = controls_at(0.5 * (t + t_stop))
        n_steps = max(1, int(math.ceil((t_stop - t) / dt - 1e-12)))
        h_nominal = (t_stop - t) / n_steps
        for k in range(n_steps):
            h = h_nominal
            k1 = dynamics(y, u)
            k2 = dynamics(y + 0.5 * h * k1, u)
            k3 = dynamics(y + 0.5 * h * k2, u)
            k4 = dynamics(y + h * k3, u)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t = t + h
            times.append(t)
            states.append(y.copy())
        t = t_stop
    return np.array(times), np.array(states)


def _forward_schedule(traj: Trajectory):
    """Reversed control schedule: segment k rules t in [T - tau_end, T - tau_a]."""
    T = traj.total_tau
    entries = []
    for seg in reversed(traj.segments):
        entries.append((max(0.0, T - seg.tau_end), seg.controls))
    return entries


def _closed_form_reduced(traj: Trajectory, taus):
    """Closed-form reduced states at the given retro times, per segment."""
    taus = np.asarray(taus, dtype=float)
    out = np.empty((taus.size, 3))
    done = np.zeros(taus.size, dtype=bool)
    for seg in traj.segments:
        mask = (~done) & (taus <= seg.tau_end + 1e-12)
        if not np.any(mask):
            continue
        x, y, theta = seg.reduced_arrays(np.maximum(taus[mask], seg.anchor_tau))
        out[mask, 0] = x
        out[mask, 1] = y
        out[mask, 2] = theta
        done[mask] = True
    if not np.all(done):
        out[~done] = _closed_form_reduced(
            traj, np.minimum(taus[~done], traj.total_tau))
    return out


def replay(traj: Trajectory, pursuer_start_pose=_DEFAULT_PURSUER_POSE,
           dt: float = 1e-4) -> SimResult:
    """Forward-time play of a synthesized trajectory.

    Both players are integrated numerically from the start poses (the
    evader's start pose is recovered from the closed-form reduced state at
    tau = total_tau); the reduced closed form is sampled alongside.
    escape_time equals total_tau exactly (same schedule, reversed).
    """
    T = traj.total_tau
    schedule = _forward_schedule(traj)
    start_reduced = traj.reduced_at(T)
    ev0 = from_reduced(start_reduced, pursuer_start_pose)
    state0 = np.array([*pursuer_start_pose, ev0.x_e, ev0.y_e, ev0.theta_e])

    def dyn(y, u):
        return realistic_rhs(y, u.nu_p, u.nu_e)

    times, states = rk4_integrate(dyn, state0, schedule, (0.0, T), dt)
    reduced = _closed_form_reduced(traj, T - times)
    controls = np.array([[u.nu_p, u.nu_e] for u in
                         (traj.controls_at(min(max(T - t, 0.0), T))
                          for t in times)])
    final = to_cylindrical(traj.reduced_at(0.0))
    escaped = abs(final.phi) >= traj.params.phi_d - traj.params.tol_event
    return SimResult(times, states[:, :3], states[:, 3:], reduced, controls,
                     escape_time=T, escaped=escaped, trajectory=traj)


def cross_validate(traj: Trajectory, dt: float = 1e-4) -> dict:
    """Max deviation of each segment's closed form from RK4 retro-integration.

    Integrates the retro reduced kinematics with the segment's constant
    controls from its anchor and compares at every accepted step.
    """
    per_segment = []
    worst = 0.0
    for seg in traj.segments:
        a = seg.anchor_state
        y = np.array([a.r * math.sin(a.phi), a.r * math.cos(a.phi), a.theta])
        span = seg.tau_end - seg.anchor_tau
        if span <= 0.0:
            per_segment.append({"family": seg.family.value, "max_deviation": 0.0})
            continue
        n_steps = max(1, int(math.ceil(span / dt - 1e-12)))
        h = span / n_steps
        taus = seg.anchor_tau + h * np.arange(n_steps + 1)
        xs, ys, ths = seg.reduced_arrays(taus)
        dev = 0.0
        for k in range(n_steps):
            k1 = retro_reduced_rhs(y, seg.nu_p, seg.nu_e)
            k2 = retro_reduced_rhs(y + 0.5 * h * k1, seg.nu_p, seg.nu_e)
            k3 = retro_reduced_rhs(y + 0.5 * h * k2, seg.nu_p, seg.nu_e)
            k4 = retro_reduced_rhs(y + h * k3, seg.nu_p, seg.nu_e)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            dev = max(dev, abs(y[0] - xs[k + 1]), abs(y[1] - ys[k + 1]),
                      abs(y[2] - ths[k + 1]))
        per_segment.append({"family": seg.family.value, "max_deviation": dev})
        worst = max(worst, dev)
    return {"max_deviation": worst, "dt": dt, "segments": per_segment}


def run_scenario(sc: Scenario) -> SimResult:
    """Synthesize the scenario's seed and replay it forward."""
    traj = synthesize(sc.seed, sc.params, sc.branch)
    return replay(traj, sc.pursuer_start_pose, sc.dt)


# ---------------------------------------------------------------------------
# scenario files


def load_scenario(path) -> Scenario:
    """Read a scenario JSON file; errors cite the offending field."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ScenarioError(
            f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"
        ) from e
    return scenario_from_dict(raw, source=str(path))


def scenario_from_dict(raw: dict, source: str = "<dict>") -> Scenario:
    def need(key):
        if key not in raw:
            raise ScenarioError(f"{source}: missing required field '{key}'")
        return raw[key]

    if "realistic_state" in raw:
        raise ScenarioError(
            f"{source}: explicit realistic-state scenarios are not supported; "
            "provide a terminal seed (synthesis is anchored at the game's end)")
    try:
        params = GameParams(
            phi_d=math.radians(float(need("phi_d_degrees"))),
            tol_root=float(raw.get("tol_root", 1e-10)),
            tol_event=float(raw.get("tol_event", 1e-9)),
            tau_max=float(raw.get("tau_max", 2.0 * math.pi)),
            scan_dtau=float(raw.get("scan_dtau", 1e-3)),
        )
        side = BoundarySide(raw.get("side", "right"))
        kind = SeedKind(raw.get("kind", "up-interior"))
        seed = Seed(float(need("seed_r")),
                    math.radians(float(need("theta_d_degrees"))), side, kind)
        branch = None
        if raw.get("branch") is not None:
            b = raw["branch"]
            branch = EusBranch(float(b["tau_us"]), float(b["nu_e"]))
        pose = tuple(float(v) for v in
                     raw.get("pursuer_start_pose", _DEFAULT_PURSUER_POSE))
        if len(pose) != 3:
            raise ScenarioError(f"{source}: pursuer_start_pose needs 3 entries")
        return Scenario(params, seed, branch, pose,
                        float(raw.get("dt", 1e-4)),
                        str(raw.get("description", "")))
    except ScenarioError:
        raise
    except (KeyError, ValueError, TypeError) as e:
        raise ScenarioError(f"{source}: bad scenario field: {e}") from e


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario shipped with the package (sim1 .. sim5)."""
    p = Path(__file__).parent / "scenarios" / f"{name}.json"
    if not p.exists():
        raise ScenarioError(f"no bundled scenario named {name!r}")
    return p
