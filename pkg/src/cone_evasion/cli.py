"""Command-line front end: up | synth | barrier | simulate | validate.

Exit codes: 0 success, 1 validation/runtime failure, 2 usage or config
error.  Angles on the command line and in config files are degrees.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import Config, load_config
from .errors import ScenarioError
from .output import (read_table, write_manifest, write_table,
                     write_trajectory)
from .simulate import bundled_scenario_path, load_scenario, run_scenario
from .synthesis import (EusBranch, barrier_emanation, synthesize,
                        synthesize_barrier)
from .terminal import (Seed, SeedKind, classify, rbup_radius, lbup_radius,
                       sample_seeds, upl_membership)
from .kinematics import CylindricalState
from . import validate as validate_mod

_OVERRIDE_KEYS = ("phi_d_degrees", "tau_max", "dt", "output_dir", "format",
                  "n_theta", "n_r")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="flat JSON config")
    common.add_argument("--phi-d-degrees", type=float, dest="phi_d_degrees")
    common.add_argument("--tau-max", type=float, dest="tau_max")
    common.add_argument("--dt", type=float)
    common.add_argument("--out", dest="output_dir", metavar="DIR")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--seeds-theta", type=int, dest="n_theta", metavar="N")
    common.add_argument("--seeds-r", type=int, dest="n_r", metavar="N")

    p = argparse.ArgumentParser(
        prog="cone-evasion",
        description="Two-Dubins-car conic-surveillance evasion game engine")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("up", parents=[common],
                   help="usable part / boundary / apex-line tables")
    sub.add_parser("synth", parents=[common],
                   help="synthesize the optimal trajectory families")
    sub.add_parser("barrier", parents=[common],
                   help="barrier trajectories and emanation census")
    sim = sub.add_parser("simulate", parents=[common],
                         help="forward replay of a scenario")
    sim.add_argument("--scenario", required=True, metavar="FILE",
                     help="scenario JSON path or bundled name (sim1..sim5)")
    sim.add_argument("--snapshot-interval", type=float, default=0.5)
    val = sub.add_parser("validate", parents=[common],
                         help="run the numerical check battery")
    val.add_argument("--check-outputs", metavar="DIR",
                     help="re-validate previously exported files")
    return p


def _config_from_args(args) -> Config:
    overrides = {k: getattr(args, k, None) for k in _OVERRIDE_KEYS}
    return load_config(args.config, overrides)


def _outdir(config: Config) -> Path:
    d = Path(config.output_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_up(config: Config) -> list:
    """Tables of the terminal manifold over both cone boundaries."""
    params = config.game_params()
    out = _outdir(config)
    sha = config.sha256()
    ext = config.format
    files = []

    hi = params.theta_rbup_max
    n_pts = config.n_theta + 1
    bup_rows = []
    for th in np.linspace(0.0, hi, n_pts):
        bup_rows.append(("right", float(th), rbup_radius(float(th), params)))
    lo = math.pi - 2.0 * params.phi_d
    for th in np.linspace(lo, 2.0 * math.pi, n_pts):
        bup_rows.append(("left", float(th), lbup_radius(float(th), params)))
    f = out / f"bup.{ext}"
    n = write_table(f, ("side", "theta", "r"), bup_rows, sha, ext)
    files.append({"file": f.name, "kind": "bup", "rows": n})

    upl_rows = []
    for th in np.linspace(0.0, 2.0 * math.pi, 2 * config.n_theta + 1):
        upl_rows.append((float(th), upl_membership(float(th), params).value))
    f = out / f"upl.{ext}"
    n = write_table(f, ("theta", "membership"), upl_rows, sha, ext)
    files.append({"file": f.name, "kind": "upl", "rows": n})

    grid_rows = []
    for th in np.linspace(0.0, hi, n_pts):
        r_b = rbup_radius(float(th), params)
        for frac in [(j + 0.5) / max(config.n_r, 1)
                     for j in range(max(config.n_r, 1))]:
            r = frac * max(r_b, 1e-6)
            cls = classify(CylindricalState(r, params.phi_d, float(th)), params)
            grid_rows.append(("right", float(th), r, cls.value))
    f = out / f"up_grid.{ext}"
    n = write_table(f, ("side", "theta", "r", "class"), grid_rows, sha, ext)
    files.append({"file": f.name, "kind": "up-grid", "rows": n})

    write_manifest(out / "manifest.json", config.to_dict(), sha, files)
    return files


def _seed_entry(seed: Seed) -> dict:
    return {"r": seed.r, "theta_d": seed.theta_d, "side": seed.side.value,
            "kind": seed.kind.value}


def _switch_entries(traj) -> list:
    out = []
    for seg, nxt in zip(traj.segments, traj.segments[1:]):
        if seg.termination.value != "pursuer-switch":
            continue
        c = nxt.anchor_state
        lam = nxt.anchor_costate
        out.append({"tau_s": seg.tau_end,
                    "nu_p_before": seg.nu_p, "nu_p_after": nxt.nu_p,
                    "state": {"r": c.r, "phi": c.phi, "theta": c.theta},
                    "costate": {"lambda_x": lam.lambda_x,
                                "lambda_y": lam.lambda_y,
                                "lambda_theta": lam.lambda_theta}})
    return out


def cmd_synth(config: Config) -> list:
    """One trajectory file per usable-part seed, plus universal-surface
    trajectories with a tributary pair branched at half their span."""
    params = config.game_params()
    out = _outdir(config)
    sha = config.sha256()
    ext = config.format
    files = []
    idx = 0

    jobs = [(s, None) for s in sample_seeds(params, config.n_theta, config.n_r)
            if s.kind is SeedKind.UP_INTERIOR]
    r_b = rbup_radius(params.theta_eus, params)
    for j in range(config.n_r):
        r = (j + 0.5) * r_b / config.n_r
        eus_seed = Seed(r, params.theta_eus)
        plain = synthesize(eus_seed, params)
        jobs.append((eus_seed, None))
        for side in (-1.0, 1.0):
            jobs.append((eus_seed, EusBranch(0.5 * plain.total_tau, side)))

    for seed, branch in jobs:
        name = f"traj_{idx:04d}.{ext}"
        idx += 1
        try:
            traj = synthesize(seed, params, branch)
            n = write_trajectory(out / name, traj, sha, config.sample_dtau, ext)
        except Exception as e:  # per-seed failures logged, run continues
            print(f"synth: seed {seed} failed: {e}", file=sys.stderr)
            continue
        entry = {"file": name, "seed": _seed_entry(seed),
                 "families": sorted({s.family.value for s in traj.segments}),
                 "total_tau": traj.total_tau, "rows": n,
                 "switches": _switch_entries(traj)}
        if branch is not None:
            entry["branch"] = {"tau_us": branch.tau_us, "nu_e": branch.nu_e}
        files.append(entry)

    grid = sample_seeds(params, config.n_theta, config.n_r)
    if grid:
        seeds_path = out / "seeds.json"
        seeds_path.write_text(json.dumps(
            {"config_sha256": sha, "seeds": [_seed_entry(s) for s in grid]},
            indent=1, sort_keys=True) + "\n")
        files.append({"file": seeds_path.name, "kind": "seed-grid",
                      "rows": len(grid)})
    write_manifest(out / "manifest.json", config.to_dict(), sha, files)
    return files


def cmd_barrier(config: Config) -> list:
    """Barrier trajectories over a heading grid plus the emanation table."""
    params = config.game_params()
    out = _outdir(config)
    sha = config.sha256()
    ext = config.format
    files = []
    hi = params.theta_rbup_max
    n = max(config.n_theta, 1)
    thetas = [(i + 0.5) * hi / n for i in range(n)]

    census_rows = []
    for i, th in enumerate(thetas):
        emanation = barrier_emanation(th, params)
        census_rows.append((float(th), math.degrees(th), emanation.value))
        name = f"barrier_{i:04d}.{ext}"
        try:
            _, traj = synthesize_barrier(th, params)
            rows = write_trajectory(out / name, traj, sha,
                                    config.sample_dtau, ext)
        except Exception as e:
            print(f"barrier: theta_rb={th} failed: {e}", file=sys.stderr)
            continue
        files.append({"file": name, "theta_rb": float(th),
                      "emanation": emanation.value,
                      "termination": traj.segments[-1].termination.value,
                      "total_tau": traj.total_tau, "rows": rows,
                      "switches": _switch_entries(traj)})

    f = out / f"emanation.{ext}"
    rows = write_table(f, ("theta_rb", "theta_rb_degrees", "emanation"),
                       census_rows, sha, ext)
    files.append({"file": f.name, "kind": "emanation-census", "rows": rows})
    write_manifest(out / "manifest.json", config.to_dict(), sha, files)
    return files


def cmd_simulate(config: Config, scenario_ref: str,
                 snapshot_interval: float = 0.5) -> dict:
    """Run one scenario; write the sampled path, snapshots, and a summary."""
    path = Path(scenario_ref)
    if not path.exists():
        path = bundled_scenario_path(scenario_ref)
    sc = load_scenario(path)
    result = run_scenario(sc)
    out = _outdir(config)
    sha = config.sha256()
    ext = config.format

    cols = ("t", "x_p", "y_p", "theta_p", "x_e", "y_e", "theta_e",
            "x", "y", "theta", "nu_p", "nu_e")
    n_samples = result.times.size
    stride = max(1, n_samples // 2000)
    keep = sorted(set(range(0, n_samples, stride)) | {n_samples - 1})
    rows = [(result.times[i], *result.pursuer_path[i], *result.evader_path[i],
             *result.reduced_path[i], *result.control_log[i]) for i in keep]
    f_path = out / f"sim_path.{ext}"
    write_table(f_path, cols, rows, sha, ext)

    snap_times = list(np.arange(0.0, result.escape_time, snapshot_interval))
    snap_times.append(result.escape_time)
    snap_rows = []
    for t in snap_times:
        i = int(np.argmin(np.abs(result.times - t)))
        snap_rows.append((result.times[i], *result.pursuer_path[i],
                          *result.evader_path[i], *result.reduced_path[i],
                          *result.control_log[i]))
    f_snap = out / f"sim_snapshots.{ext}"
    write_table(f_snap, cols, snap_rows, sha, ext)

    summary = {
        "scenario": str(path),
        "description": sc.description,
        "escape_time": result.escape_time,
        "escaped": bool(result.escaped),
        "seed": _seed_entry(sc.seed),
        "segments": [{"family": s.family.value,
                      "termination": s.termination.value,
                      "tau_end": s.tau_end} for s in result.trajectory.segments],
        "config_sha256": sha,
    }
    (out / "sim_summary.json").write_text(
        json.dumps(summary, indent=1, sort_keys=True) + "\n")
    write_manifest(out / "manifest.json", config.to_dict(), sha, [
        {"file": f_path.name, "kind": "sim-path", "rows": len(rows)},
        {"file": f_snap.name, "kind": "sim-snapshots", "rows": len(snap_rows)},
        {"file": "sim_summary.json", "kind": "sim-summary", "rows": 1},
    ])
    return summary


def _recheck_outputs(dir_path: Path) -> list:
    """Re-parse exported trajectory files; enforce single provenance and
    state continuity at the duplicated segment-junction rows."""
    results = []
    shas = {}
    traj_files = sorted(list(dir_path.glob("traj_*.csv"))
                        + list(dir_path.glob("traj_*.json"))
                        + list(dir_path.glob("barrier_*.csv"))
                        + list(dir_path.glob("barrier_*.json")))
    for f in traj_files:
        sha, columns, rows = read_table(f)
        shas.setdefault(sha, []).append(f.name)
        err = 0.0
        for a, b in zip(rows, rows[1:]):
            if abs(a[0] - b[0]) < 1e-12 and a[-1] != b[-1]:
                err = max(err, *(abs(a[i] - b[i]) for i in range(1, 6)))
        results.append(validate_mod.CheckResult(
            f"recheck/{f.name}", err < 1e-9, err, 1e-9, len(rows),
            "junction continuity of exported rows"))
    if len(shas) > 1:
        raise ValueError(
            f"mixed provenance in {dir_path}: config hashes {sorted(shas)}")
    return results


def cmd_validate(config: Config, check_outputs: str | None = None) -> int:
    results = validate_mod.run_all(config)
    if check_outputs:
        results += _recheck_outputs(Path(check_outputs))
    out = _outdir(config)
    report = {"config_sha256": config.sha256(),
              "checks": [r.to_dict() for r in results],
              "passed": all(r.passed for r in results)}
    (out / "validation_report.json").write_text(
        json.dumps(report, indent=1, sort_keys=True) + "\n")
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: max_error={r.max_error:.3e} "
              f"tol={r.tolerance:.1e} n={r.count}")
    return 0 if report["passed"] else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
    except (ValueError, OSError, json.JSONDecodeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        if args.command == "up":
            cmd_up(config)
        elif args.command == "synth":
            cmd_synth(config)
        elif args.command == "barrier":
            cmd_barrier(config)
        elif args.command == "simulate":
            cmd_simulate(config, args.scenario, args.snapshot_interval)
        elif args.command == "validate":
            return cmd_validate(config, args.check_outputs)
    except ScenarioError as e:
        print(f"scenario error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"i/o error: {getattr(e, 'filename', '')}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
