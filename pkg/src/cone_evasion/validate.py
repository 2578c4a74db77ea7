"""Cross-cutting numerical checks: oracle equivalence, Pontryagin
properties, continuity, emanation, and mirror symmetry.

These back both the `validate` CLI command and the acceptance suite.  The
closed forms are compared against independent numerics (fixed-step RK4 on
the retro kinematics, finite differences on the adjoint equation), never
against themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kinematics import GameParams, wrap_signed
from .synthesis import (FamilyTag, Trajectory, _arc_xyth, _bang_xyth,
                        _singular_xyth, barrier_emanation, bupl_switch_check,
                        Emanation, EusBranch, mirror_trajectory, synthesize,
                        synthesize_barrier)
from .terminal import (BoundarySide, Seed, mirror_seed, rbup_radius,
                       sample_seeds, seed_radius_bound)


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    count: int
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed),
                "max_error": float(self.max_error),
                "tolerance": float(self.tolerance),
                "count": int(self.count), "detail": self.detail}


# ---------------------------------------------------------------------------
# anchor harvesting


def _retro_rhs_batch(y, nu_p, nu_e):
    x, yy, th = y
    return np.stack([
        -(nu_p * yy + np.sin(th)),
        -(-nu_p * x - 1.0 + np.cos(th)),
        -(nu_p - nu_e) * np.ones_like(x),
    ])


def _anchor_from_segments(trajs, family, n_want):
    """(xyth0, nu_p, nu_e) arrays from synthesized segments of one family."""
    xs, nps, nes = [], [], []
    for traj in trajs:
        for seg in traj.segments:
            if seg.family is not family:
                continue
            a = seg.anchor_state
            xs.append((a.r * math.sin(a.phi), a.r * math.cos(a.phi), a.theta))
            nps.append(seg.nu_p)
            nes.append(seg.nu_e)
            if len(xs) >= n_want:
                return (np.array(xs).T, np.array(nps), np.array(nes))
    if not xs:
        return None
    return (np.array(xs).T, np.array(nps), np.array(nes))


def family_anchor_sets(params: GameParams, n_per_family: int = 100) -> dict:
    """Anchor states and controls for every trajectory family.

    Primary/EUS/tributary/barrier anchors come from their defining grids;
    post-switch anchors are genuine switch records harvested from
    synthesized trajectories.
    """
    phi_d = params.phi_d
    theta_hi = params.theta_rbup_max
    out = {}

    # primary: headings off the universal-surface band, radii inside the UP
    n_th = max(4, int(math.ceil(n_per_family / 3)))
    thetas = [(i + 0.5) * theta_hi / n_th for i in range(n_th)
              if abs((i + 0.5) * theta_hi / n_th - params.theta_eus) > 0.05]
    prim = [(r_frac * rbup_radius(th, params), th)
            for th in thetas for r_frac in (0.25, 0.5, 0.85)]
    xyth = np.array([(r * math.sin(phi_d), r * math.cos(phi_d), th)
                     for r, th in prim]).T
    nu_e = np.array([-1.0 if th < params.theta_eus else 1.0
                     for _, th in prim])
    out["primary"] = (xyth, np.full(len(prim), -1.0), nu_e)

    # universal surface: radius sweep at the singular heading
    r_b = rbup_radius(params.theta_eus, params)
    rs = np.linspace(0.02, 0.98, n_per_family) * r_b
    xyth = np.stack([rs * math.sin(phi_d), rs * math.cos(phi_d),
                     np.full(rs.size, params.theta_eus)])
    out["eus"] = (xyth, np.full(rs.size, -1.0), np.zeros(rs.size))

    # tributaries: states on the surface at assorted branch times
    n_r = max(2, int(math.ceil(n_per_family / 10)))
    anchors, nps, nes = [], [], []
    for r in np.linspace(0.1, 0.9, n_r) * r_b:
        for tau_us in np.linspace(0.1, 1.0, 5):
            x, y, th = _singular_xyth(tau_us, r, phi_d, params.theta_eus, -1.0)
            for side in (-1.0, 1.0):
                anchors.append((x, y, th))
                nps.append(-1.0)
                nes.append(side)
    out["tributary"] = (np.array(anchors).T, np.array(nps), np.array(nes))

    # post-switch continuations of the primary solution (switches precede
    # the boundary re-encounter mainly at small seed radii)
    trajs = []
    for th_frac in np.linspace(0.03, 0.97, 3 * n_per_family // 2):
        th = th_frac * theta_hi
        if abs(th - params.theta_eus) < 0.05:
            continue
        for r_frac in (0.05, 0.12, 0.25):
            trajs.append(synthesize(
                Seed(r_frac * rbup_radius(th, params), th), params))
    post = _anchor_from_segments(trajs, FamilyTag.POST_TS_PRIMARY,
                                 n_per_family)
    if post is None:
        raise RuntimeError("no primary switch records found")
    out["post-ts-primary"] = post

    # barrier arcs and their post-switch continuations
    th_grid = np.linspace(0.02, theta_hi - 0.02, max(n_per_family, 300))
    th_grid = th_grid[np.abs(th_grid - params.theta_eus) > 2.0 * params.tol_event]
    xyth = np.array([(rbup_radius(th, params) * math.sin(phi_d),
                      rbup_radius(th, params) * math.cos(phi_d), th)
                     for th in th_grid]).T
    nu_e = np.where(th_grid < params.theta_eus, -1.0, 1.0)
    out["barrier"] = (xyth, np.full(th_grid.size, -1.0), nu_e)

    btrajs = [synthesize_barrier(th, params)[1] for th in th_grid]
    post_b = _anchor_from_segments(btrajs, FamilyTag.POST_TS_BARRIER,
                                   n_per_family)
    if post_b is None:
        raise RuntimeError("no barrier switch records found")
    out["post-ts-barrier"] = post_b
    return out


def check_oracle_equivalence(params: GameParams, n_per_family: int = 100,
                             dt: float = 1e-4, tau_span: float = 2.0,
                             tol: float = 1e-6,
                             inject_offset: float = 0.0) -> list[CheckResult]:
    """Closed forms vs batched RK4 retro-integration, one result per family.

    ``inject_offset`` shifts the closed-form x component; nonzero values
    are for fault-injection sanity tests and must make the check fail.
    """
    results = []
    n_checks = 8
    for name, (xyth0, nu_p, nu_e) in family_anchor_sets(
            params, n_per_family).items():
        singular = name == "eus"
        y = xyth0.copy()
        n_steps = int(round(tau_span / dt))
        checkpoints = {int(round(k * n_steps / n_checks)): k
                       for k in range(1, n_checks + 1)}
        err = 0.0
        for step in range(1, n_steps + 1):
            k1 = _retro_rhs_batch(y, nu_p, nu_e)
            k2 = _retro_rhs_batch(y + 0.5 * dt * k1, nu_p, nu_e)
            k3 = _retro_rhs_batch(y + 0.5 * dt * k2, nu_p, nu_e)
            k4 = _retro_rhs_batch(y + dt * k3, nu_p, nu_e)
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if step in checkpoints:
                tau = step * dt
                if singular:
                    cf = np.stack(_singular_xyth(tau, *_cyl_args(xyth0), -1.0))
                else:
                    cf = np.stack(_bang_xyth(tau, *_cyl_args(xyth0),
                                             nu_p, nu_e))
                cf = cf + np.array([[inject_offset], [0.0], [0.0]])
                err = max(err, float(np.max(np.abs(cf - y))))
        results.append(CheckResult(
            f"oracle-equivalence/{name}", err < tol, err, tol,
            xyth0.shape[1], f"dt={dt}, tau in [0, {tau_span}]"))
    return results


def _cyl_args(xyth0):
    x, y, th = xyth0
    r = np.hypot(x, y)
    phi = np.arctan2(x, y)
    return r, phi, th


# ---------------------------------------------------------------------------
# Pontryagin properties along synthesized trajectories


def validation_trajectories(params: GameParams, n_theta: int = 12,
                            n_r: int = 3) -> list[Trajectory]:
    """Synthesized set covering every family, both sides, both seed kinds."""
    trajs = [synthesize(s, params) for s in sample_seeds(params, n_theta, n_r)]
    r_b = rbup_radius(params.theta_eus, params)
    for r_frac in (0.2, 0.5, 0.8):
        eus_seed = Seed(r_frac * r_b, params.theta_eus)
        plain = synthesize(eus_seed, params)
        tau_us = 0.5 * plain.total_tau
        for side in (-1.0, 1.0):
            trajs.append(synthesize(eus_seed, params,
                                    EusBranch(tau_us, side)))
        trajs.append(plain)
        # mirrored EUS seeds exercise the left-side singular path
        left = Seed(r_frac * r_b, 2.0 * math.pi - params.theta_eus,
                    BoundarySide.LEFT)
        trajs.append(synthesize(left, params, EusBranch(tau_us, 1.0)))
    return trajs


def _segment_samples(seg, n: int = 100):
    taus = np.linspace(seg.anchor_tau, max(seg.tau_end, seg.anchor_tau), n)
    x, y, th = seg.reduced_arrays(taus)
    lx, ly, lth = seg.costate_arrays(taus)
    return taus, x, y, th, lx, ly, lth


def _pmp_multiplier(traj: Trajectory) -> float:
    """Cost multiplier fixed by the unit-norm terminal costate.

    The closed-form costates keep |(lambda_x, lambda_y)| = 1, under which
    the conserved Hamiltonian value is -(bup_radius - seed_r); the
    minimum-time statement H = 0 holds with cost weight
    lambda_0 = bup_radius(theta_d) - seed_r (zero on the barrier, whose
    condition is the semipermeability lambda . f = 0).
    """
    return seed_radius_bound(traj.seed, traj.params) - traj.seed.r


def check_hamiltonian(trajs, tol: float = 1e-8,
                      samples_per_segment: int = 100) -> CheckResult:
    err = 0.0
    count = 0
    for traj in trajs:
        lam0 = _pmp_multiplier(traj)
        for seg in traj.segments:
            _, x, y, th, lx, ly, lth = _segment_samples(
                seg, samples_per_segment)
            lam_dot_f = (lx * (seg.nu_p * y + np.sin(th))
                         + ly * (-seg.nu_p * x - 1.0 + np.cos(th))
                         + lth * (seg.nu_p - seg.nu_e))
            if lam0 > 1e-6:
                res = lam_dot_f / lam0 + 1.0
            else:
                res = lam_dot_f
            err = max(err, float(np.max(np.abs(res))))
            count += res.size
    return CheckResult("hamiltonian-zero", err < tol, err, tol, count,
                       "unit-norm costate, seed PMP multiplier")


def check_unit_norm(trajs, tol: float = 1e-12,
                    samples_per_segment: int = 100) -> CheckResult:
    err = 0.0
    count = 0
    for traj in trajs:
        for seg in traj.segments:
            _, _, _, _, lx, ly, _ = _segment_samples(seg, samples_per_segment)
            err = max(err, float(np.max(np.abs(lx * lx + ly * ly - 1.0))))
            count += lx.size
    return CheckResult("costate-unit-norm", err < tol, err, tol, count)


def check_adjoint_ode(trajs, tol: float = 1e-6, h: float = 1e-5,
                      samples_per_segment: int = 25) -> CheckResult:
    """Costate closed forms satisfy the retro adjoint equation (central FD)."""
    err = 0.0
    count = 0
    for traj in trajs:
        for seg in traj.segments:
            taus = np.linspace(seg.anchor_tau + h,
                               max(seg.tau_end, seg.anchor_tau + 2 * h),
                               samples_per_segment)
            _, _, th = seg.reduced_arrays(taus)
            lx, ly, lth = seg.costate_arrays(taus)
            lxp, lyp, lthp = seg.costate_arrays(taus + h)
            lxm, lym, lthm = seg.costate_arrays(taus - h)
            fd_x = (lxp - lxm) / (2 * h)
            fd_y = (lyp - lym) / (2 * h)
            fd_th = (lthp - lthm) / (2 * h)
            err = max(err,
                      float(np.max(np.abs(fd_x - (-seg.nu_p * ly)))),
                      float(np.max(np.abs(fd_y - seg.nu_p * lx))),
                      float(np.max(np.abs(fd_th - (lx * np.cos(th)
                                                   - ly * np.sin(th))))))
            count += 3 * taus.size
    return CheckResult("adjoint-ode-fd", err < tol, err, tol, count,
                       f"central differences, h={h}")


def check_continuity(trajs, tol: float = 1e-9) -> CheckResult:
    err = 0.0
    count = 0
    for traj in trajs:
        for prev, nxt in zip(traj.segments, traj.segments[1:]):
            tau_j = prev.tau_end
            a, b = prev.reduced_at(tau_j), nxt.reduced_at(tau_j)
            la, lb = prev.costate_at(tau_j), nxt.costate_at(tau_j)
            err = max(err, abs(a.x - b.x), abs(a.y - b.y),
                      abs(wrap_signed(a.theta - b.theta)),
                      abs(la.lambda_x - lb.lambda_x),
                      abs(la.lambda_y - lb.lambda_y),
                      abs(la.lambda_theta - lb.lambda_theta))
            count += 1
    return CheckResult("junction-continuity", err < tol, err, tol, count)


# ---------------------------------------------------------------------------
# barrier emanation


def emanation_census(params: GameParams, step_degrees: float = 0.1):
    """(thetas_deg, classifications) over the open heading interval."""
    hi = math.degrees(params.theta_rbup_max)
    thetas = np.arange(step_degrees, hi, step_degrees)
    classes = [barrier_emanation(math.radians(d), params) for d in thetas]
    return thetas, classes


def check_emanation(params: GameParams, step_degrees: float = 0.1,
                    probe_tau: float = 1e-3) -> CheckResult:
    """Census against the analytic partition plus the small-tau phi sign.

    INSIDE must hold exactly on (0, 2*phi_d); at theta = 2*phi_d the seed
    is an equilibrium of the retro flow (phi stays on the boundary), so
    OUTSIDE probes use phi >= phi_d - 1e-12.
    """
    thetas, classes = emanation_census(params, step_degrees)
    bad = 0
    err = 0.0
    two_phi_d_deg = math.degrees(2.0 * params.phi_d)
    for th_deg, cls in zip(thetas, classes):
        want = (Emanation.INSIDE if th_deg < two_phi_d_deg - 1e-9
                else Emanation.OUTSIDE)
        if cls is not want:
            bad += 1
            continue
        th = math.radians(th_deg)
        r_rb = rbup_radius(th, params)
        nu_e = (0.0 if abs(th - params.theta_eus) <= params.tol_event
                else (-1.0 if th < params.theta_eus else 1.0))
        x, y, _ = _arc_xyth(probe_tau, 0.0, r_rb, params.phi_d, th, -1.0, nu_e)
        phi = math.atan2(float(x), float(y))
        if cls is Emanation.INSIDE:
            ok = phi < params.phi_d
            err = max(err, phi - params.phi_d) if not ok else err
        else:
            ok = phi >= params.phi_d - 1e-12
            err = max(err, params.phi_d - phi) if not ok else err
        if not ok:
            bad += 1
    return CheckResult("barrier-emanation", bad == 0, err, 0.0, thetas.size,
                       f"{bad} disagreements on a {step_degrees} deg grid")


def check_bupl(params: GameParams, tol: float = 1e-12) -> CheckResult:
    err = 0.0
    expected = {0.0: (-1, -1), params.theta_rbup_max: (-1, 1)}
    ok = True
    for th, (want_p, want_e) in expected.items():
        res = bupl_switch_check(th, params)
        err = max(err, abs(res.s_dot + math.cos(params.phi_d)))
        ok = ok and res.nu_p == want_p and res.nu_e == want_e
    return CheckResult("bupl-switch", ok and err < tol, err, tol, 2,
                       "apex S-dot equals -cos(phi_d) with the paired controls")


# ---------------------------------------------------------------------------
# mirror symmetry


def check_mirror(params: GameParams, n_seeds: int = 100,
                 tol: float = 1e-9) -> CheckResult:
    """Left-side synthesis vs the mirror of right-side synthesis, and the
    mirrored forms against RK4 on the genuine left-side retro dynamics."""
    err = 0.0
    count = 0
    theta_hi = params.theta_rbup_max
    n_th = max(1, n_seeds // 2)
    for i in range(n_th):
        th = (i + 0.5) * theta_hi / n_th
        for r_frac in (0.3, 0.7):
            seed_r = Seed(r_frac * rbup_radius(th, params), th,
                          BoundarySide.RIGHT)
            right = synthesize(seed_r, params)
            mirrored = mirror_trajectory(right)
            left = synthesize(mirror_seed(seed_r), params)
            for tau in np.linspace(0.0, right.total_tau, 9):
                a = mirrored.reduced_at(tau)
                b = left.reduced_at(tau)
                la = mirrored.costate_at(tau)
                lb = left.costate_at(tau)
                err = max(err, abs(a.x - b.x), abs(a.y - b.y),
                          abs(wrap_signed(a.theta - b.theta)),
                          abs(la.lambda_x - lb.lambda_x),
                          abs(la.lambda_y - lb.lambda_y),
                          abs(la.lambda_theta - lb.lambda_theta))
            count += 1
    return CheckResult("mirror-symmetry", err < tol, err, tol, count)


def check_mirror_dynamics(params: GameParams, tol: float = 1e-6,
                          dt: float = 1e-4, tau_span: float = 1.0) -> CheckResult:
    """Mirrored closed forms solve the left-side retro ODE (RK4 oracle)."""
    err = 0.0
    count = 0
    theta_hi = params.theta_rbup_max
    for th in np.linspace(0.3, theta_hi - 0.3, 8):
        seed = Seed(0.5 * rbup_radius(th, params), th)
        left = mirror_trajectory(synthesize(seed, params))
        seg = left.segments[0]
        a = seg.anchor_state
        y = np.array([[a.r * math.sin(a.phi)], [a.r * math.cos(a.phi)],
                      [a.theta]])
        n_steps = int(round(tau_span / dt))
        for step in range(n_steps):
            k1 = _retro_rhs_batch(y, seg.nu_p, seg.nu_e)
            k2 = _retro_rhs_batch(y + 0.5 * dt * k1, seg.nu_p, seg.nu_e)
            k3 = _retro_rhs_batch(y + 0.5 * dt * k2, seg.nu_p, seg.nu_e)
            k4 = _retro_rhs_batch(y + dt * k3, seg.nu_p, seg.nu_e)
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        xs, ys, ths = seg.reduced_arrays(tau_span)
        err = max(err, abs(float(xs) - y[0, 0]), abs(float(ys) - y[1, 0]),
                  abs(float(ths) - y[2, 0]))
        count += 1
    return CheckResult("mirror-left-ode", err < tol, err, tol, count,
                       f"RK4 dt={dt} over tau in [0, {tau_span}]")


# ---------------------------------------------------------------------------
# driver


def run_all(config, inject_offset: float = 0.0,
            n_per_family: int = 60) -> list[CheckResult]:
    """Full check battery at CLI scale; never aborts early."""
    params = config.game_params()
    results = []
    results += check_oracle_equivalence(params, n_per_family=n_per_family,
                                        dt=1e-3, inject_offset=inject_offset)
    trajs = validation_trajectories(params, n_theta=min(config.n_theta, 16),
                                    n_r=min(config.n_r, 4))
    results.append(check_hamiltonian(trajs))
    results.append(check_unit_norm(trajs))
    results.append(check_adjoint_ode(trajs))
    results.append(check_continuity(trajs))
    results.append(check_emanation(params, step_degrees=0.5))
    results.append(check_bupl(params))
    results.append(check_mirror(params, n_seeds=24))
    results.append(check_mirror_dynamics(params, dt=1e-3))
    return results
