"""Closed-form retro-time trajectory families and their composition.

Every bang-bang family (primary, tributaries, post-switch continuations,
barrier) is one template re-anchored at a different configuration: the
retro-time solution of the reduced kinematics under constant controls
``|nu_p| = |nu_e| = 1``.  The evader's universal surface uses a second
template with secular terms (``nu_e = 0``).  A synthesized trajectory is a
chain of such arcs, cut at events: the pursuer's control switch (sign
change of S), the trajectory meeting the cone boundary again, or the
retro-time horizon.

Left-boundary trajectories are the y-axis mirror of right-boundary ones
(state ``(x, y, theta) -> (-x, y, -theta)``, costate
``(lx, ly, lth) -> (-lx, ly, -lth)``, controls negated).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .control import (Costate, SwitchRecord, _record_from_scan,
                      terminal_evader_control)
from .errors import GameDomainError
from .kinematics import (TWO_PI, Controls, CylindricalState, GameParams,
                         ReducedState, wrap_angle)
from .terminal import (BoundarySide, Seed, SeedKind, mirror_seed,
                       rbup_radius, seed_radius_bound)


class FamilyTag(Enum):
    PRIMARY = "primary"
    EUS = "eus"
    TRIBUTARY_LEFT = "tributary-left"
    TRIBUTARY_RIGHT = "tributary-right"
    POST_TS_PRIMARY = "post-ts-primary"
    POST_TS_TRIBUTARY = "post-ts-tributary"
    BARRIER_PRIMARY = "barrier-primary"
    POST_TS_BARRIER = "post-ts-barrier"


class Termination(Enum):
    BOUNDARY_HIT = "boundary-hit"
    PURSUER_SWITCH = "pursuer-switch"
    HORIZON_REACHED = "horizon-reached"
    BRANCH = "branch"


class Emanation(Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"


# tributary side labels: TRIBUTARY_RIGHT is the nu_e = +1 side of the EUS
_TRIBUTARY_BY_NU_E = {-1.0: FamilyTag.TRIBUTARY_LEFT,
                      1.0: FamilyTag.TRIBUTARY_RIGHT}

_POST_SWITCH_FAMILY = {
    FamilyTag.PRIMARY: FamilyTag.POST_TS_PRIMARY,
    FamilyTag.POST_TS_PRIMARY: FamilyTag.POST_TS_PRIMARY,
    FamilyTag.TRIBUTARY_LEFT: FamilyTag.POST_TS_TRIBUTARY,
    FamilyTag.TRIBUTARY_RIGHT: FamilyTag.POST_TS_TRIBUTARY,
    FamilyTag.POST_TS_TRIBUTARY: FamilyTag.POST_TS_TRIBUTARY,
    FamilyTag.BARRIER_PRIMARY: FamilyTag.POST_TS_BARRIER,
    FamilyTag.POST_TS_BARRIER: FamilyTag.POST_TS_BARRIER,
    FamilyTag.EUS: FamilyTag.EUS,
}

_EMANATION_ZERO_TOL = 1e-12


# ---------------------------------------------------------------------------
# closed-form arc templates (vectorized over the retro-time offset)


def _bang_xyth(dtau, r_a, phi_a, theta_a, nu_p, nu_e):
    """Reduced state at retro-offset dtau from the anchor, bang controls."""
    x = (-nu_p + nu_p * np.cos(nu_p * dtau)
         - nu_e * np.cos(theta_a - nu_p * dtau)
         + nu_e * np.cos(theta_a + (nu_e - nu_p) * dtau)
         + r_a * np.sin(phi_a - nu_p * dtau))
    y = (nu_p * np.sin(nu_p * dtau)
         + r_a * np.cos(phi_a - nu_p * dtau)
         - 2.0 * nu_e * np.cos(theta_a + (0.5 * nu_e - nu_p) * dtau)
         * np.sin(0.5 * nu_e * dtau))
    theta = theta_a + (nu_e - nu_p) * dtau
    return x, y, theta


def _singular_xyth(dtau, r_a, phi_a, theta_a, nu_p):
    """Universal-surface template (nu_e = 0), with secular dtau terms."""
    x = (-nu_p + nu_p * np.cos(nu_p * dtau)
         + r_a * np.sin(phi_a - nu_p * dtau)
         - dtau * np.sin(theta_a - nu_p * dtau))
    y = (nu_p * np.sin(nu_p * dtau)
         + r_a * np.cos(phi_a - nu_p * dtau)
         - dtau * np.cos(theta_a - nu_p * dtau))
    theta = theta_a - nu_p * dtau
    return x, y, theta


def _arc_xyth(taus, tau_a, r_a, phi_a, theta_a, nu_p, nu_e):
    dtau = np.asarray(taus, dtype=float) - tau_a
    if nu_e == 0.0:
        return _singular_xyth(dtau, r_a, phi_a, theta_a, nu_p)
    return _bang_xyth(dtau, r_a, phi_a, theta_a, nu_p, nu_e)


def _arc_costate(taus, tau_a, psi_a, nu_p, nu_e, phi_d, theta_ref, tau_ref):
    taus = np.asarray(taus, dtype=float)
    psi = psi_a - nu_p * (taus - tau_a)
    lam_x = -np.cos(psi)
    lam_y = np.sin(psi)
    lam_th = nu_e * (-math.sin(phi_d - theta_ref)
                     + np.sin(phi_d - theta_ref - nu_e * (taus - tau_ref)))
    return lam_x, lam_y, lam_th


def _check_bang_controls(nu_p, nu_e):
    if abs(nu_p) != 1.0 or abs(nu_e) != 1.0:
        raise GameDomainError(
            f"bang-bang template requires |nu_p| = |nu_e| = 1, got ({nu_p}, {nu_e})")


# ---------------------------------------------------------------------------
# segments and trajectories


@dataclass(frozen=True)
class TrajectorySegment:
    """One constant-control closed-form arc of a synthesized trajectory."""

    family: FamilyTag
    anchor_state: CylindricalState
    anchor_costate: Costate
    anchor_tau: float
    nu_p: float
    nu_e: float
    tau_end: float
    termination: Termination
    phi_d: float
    lam_theta_ref: float    # terminal heading entering the lambda_theta law
    lam_tau_ref: float      # retro time where lambda_theta started growing

    @property
    def controls(self) -> Controls:
        return Controls(self.nu_p, self.nu_e)

    @property
    def _psi_anchor(self) -> float:
        lam = self.anchor_costate
        return math.atan2(lam.lambda_y, -lam.lambda_x)

    def _check_tau(self, taus):
        if np.any(np.asarray(taus) < self.anchor_tau - 1e-12):
            raise GameDomainError(
                f"segment evaluated before its anchor tau={self.anchor_tau}")

    def reduced_arrays(self, taus):
        """(x, y, theta) arrays of the reduced state at retro times taus."""
        self._check_tau(taus)
        a = self.anchor_state
        return _arc_xyth(taus, self.anchor_tau, a.r, a.phi, a.theta,
                         self.nu_p, self.nu_e)

    def costate_arrays(self, taus):
        self._check_tau(taus)
        return _arc_costate(taus, self.anchor_tau, self._psi_anchor,
                            self.nu_p, self.nu_e, self.phi_d,
                            self.lam_theta_ref, self.lam_tau_ref)

    def switch_values(self, taus):
        """Switch function S along the arc."""
        x, y, _ = self.reduced_arrays(taus)
        lam_x, lam_y, lam_th = self.costate_arrays(taus)
        return y * lam_x - x * lam_y + lam_th

    def reduced_at(self, tau: float) -> ReducedState:
        x, y, theta = self.reduced_arrays(float(tau))
        return ReducedState(float(x), float(y), float(theta))

    def state_at(self, tau: float) -> CylindricalState:
        x, y, theta = self.reduced_arrays(float(tau))
        r = math.hypot(float(x), float(y))
        phi = math.atan2(float(x), float(y)) if r > 0.0 else 0.0
        return CylindricalState(r, phi, float(theta))

    def costate_at(self, tau: float) -> Costate:
        lam_x, lam_y, lam_th = self.costate_arrays(float(tau))
        return Costate(float(lam_x), float(lam_y), float(lam_th))


@dataclass(frozen=True)
class Trajectory:
    """Ordered chain of arcs from the terminal manifold backward in time."""

    seed: Seed
    segments: tuple
    total_tau: float
    params: GameParams

    def segment_at(self, tau: float) -> TrajectorySegment:
        if tau < -1e-12 or tau > self.total_tau + 1e-12:
            raise GameDomainError(
                f"tau={tau} outside the trajectory span [0, {self.total_tau}]")
        for seg in self.segments:
            if tau <= seg.tau_end + 1e-12:
                return seg
        return self.segments[-1]

    def state_at(self, tau: float) -> CylindricalState:
        return self.segment_at(tau).state_at(tau)

    def reduced_at(self, tau: float) -> ReducedState:
        return self.segment_at(tau).reduced_at(tau)

    def costate_at(self, tau: float) -> Costate:
        return self.segment_at(tau).costate_at(tau)

    def controls_at(self, tau: float) -> Controls:
        return self.segment_at(tau).controls


@dataclass(frozen=True)
class EusBranch:
    """Where (and to which side) a tributary leaves the universal surface."""

    tau_us: float
    nu_e: float

    def __post_init__(self):
        if self.nu_e not in (-1.0, 1.0):
            raise GameDomainError(f"tributary side nu_e must be -1 or +1, got {self.nu_e}")
        if self.tau_us < 0.0:
            raise GameDomainError("branch time must be >= 0")


# ---------------------------------------------------------------------------
# public family evaluators


def primary_state(tau: float, seed_r: float, theta_d: float, nu_p: float,
                  nu_e: float, params: GameParams) -> CylindricalState:
    """Primary-solution state at retro time tau from a usable-part seed."""
    _check_bang_controls(nu_p, nu_e)
    if tau < 0.0:
        raise GameDomainError("primary_state: tau must be >= 0")
    x, y, theta = _bang_xyth(tau, seed_r, params.phi_d, theta_d, nu_p, nu_e)
    return _cyl(x, y, theta)


def eus_state(tau: float, seed_r: float, nu_p: float,
              params: GameParams) -> CylindricalState:
    """Universal-surface state; terminal heading is phi_d + pi/2."""
    if abs(nu_p) != 1.0:
        raise GameDomainError("eus_state: |nu_p| must be 1")
    if tau < 0.0:
        raise GameDomainError("eus_state: tau must be >= 0")
    x, y, theta = _singular_xyth(tau, seed_r, params.phi_d,
                                 params.theta_eus, nu_p)
    return _cyl(x, y, theta)


def tributary_state(tau: float, eus_point: CylindricalState, tau_us: float,
                    nu_e: float, params: GameParams) -> CylindricalState:
    """Tributary state at tau >= tau_us, leaving the EUS at eus_point."""
    nu_p = -1.0
    _check_bang_controls(nu_p, nu_e)
    if tau < tau_us - 1e-12:
        raise GameDomainError(
            f"tributary_state: tau={tau} precedes the junction tau_us={tau_us}")
    x, y, theta = _bang_xyth(tau - tau_us, eus_point.r, eus_point.phi,
                             eus_point.theta, nu_p, nu_e)
    return _cyl(x, y, theta)


def post_ts_state(tau: float, switch: SwitchRecord, nu_e: float,
                  params: GameParams) -> CylindricalState:
    """Continuation state after the pursuer's switch recorded in `switch`."""
    _check_bang_controls(switch.nu_p_after, nu_e)
    if tau < switch.tau_s - 1e-12:
        raise GameDomainError(
            f"post_ts_state: tau={tau} precedes the switch tau_s={switch.tau_s}")
    a = switch.state_at_switch
    x, y, theta = _bang_xyth(tau - switch.tau_s, a.r, a.phi, a.theta,
                             switch.nu_p_after, nu_e)
    return _cyl(x, y, theta)


def barrier_state(tau: float, theta_rb: float, params: GameParams) -> CylindricalState:
    """Barrier state at retro time tau from the boundary-of-UP seed theta_rb.

    The evader control follows the terminal law at theta_rb; at exactly
    theta_rb = phi_d + pi/2 the arc is the (immediately exiting) universal
    surface and the secular template applies.
    """
    if not 0.0 < theta_rb < params.theta_rbup_max:
        raise GameDomainError(
            f"barrier_state: theta_rb={theta_rb} outside (0, pi + 2*phi_d)")
    if tau < 0.0:
        raise GameDomainError("barrier_state: tau must be >= 0")
    r_rb = rbup_radius(theta_rb, params)
    nu_e = float(terminal_evader_control(theta_rb, params))
    x, y, theta = _arc_xyth(tau, 0.0, r_rb, params.phi_d, theta_rb, -1.0, nu_e)
    return _cyl(x, y, theta)


def _cyl(x, y, theta) -> CylindricalState:
    x = float(x)
    y = float(y)
    r = math.hypot(x, y)
    phi = math.atan2(x, y) if r > 0.0 else 0.0
    return CylindricalState(r, phi, float(theta))


# ---------------------------------------------------------------------------
# barrier analysis


def barrier_emanation(theta_rb: float, params: GameParams) -> Emanation:
    """Side of the cone boundary the barrier leaves toward, in retro time.

    Sign of the second retro derivative of phi on the boundary-of-UP, where
    the first derivative vanishes: INSIDE (the playing space) iff it is
    negative.  With the pursuer's boundary control nu_p = -1 the retro
    heading rate is 1 + nu_e, giving the three evader-control cases; the
    transition sits at theta_rb = 2*phi_d, where the boundary point is an
    equilibrium of the retro flow and the trajectory never leaves the
    boundary (classified OUTSIDE).
    """
    if not 0.0 < theta_rb < params.theta_rbup_max:
        raise GameDomainError(
            f"barrier_emanation: theta_rb={theta_rb} outside (0, pi + 2*phi_d)")
    nu_e = float(terminal_evader_control(theta_rb, params))
    theta_rate = 1.0 + nu_e          # retro: -nu_p + nu_e with nu_p = -1
    r_rb = rbup_radius(theta_rb, params)
    phi_ring_ring = -((1.0 + theta_rate) * math.cos(theta_rb - params.phi_d)
                      - math.cos(params.phi_d)) / r_rb
    if phi_ring_ring < -_EMANATION_ZERO_TOL:
        return Emanation.INSIDE
    return Emanation.OUTSIDE


@dataclass(frozen=True)
class BuplCheck:
    """Outcome of the apex boundary-of-UP analysis at theta in {0, pi+2*phi_d}."""

    s_dot: float
    nu_p: int
    nu_e: int


def bupl_switch_check(theta: float, params: GameParams) -> BuplCheck:
    """Retro derivative of S at an apex boundary-of-UP configuration.

    At r = 0 the switch function vanishes; its retro derivative decides the
    pursuer's control just before the game's end and rules out a pursuer
    universal surface there.  Evaluates the full composition (retro state
    rates, adjoint rates) rather than a precomputed constant; the result is
    -cos(phi_d) at both admissible headings.
    """
    th = wrap_angle(theta)
    upper = params.theta_rbup_max
    if not (min(th, TWO_PI - th) <= params.tol_event
            or abs(th - upper) <= params.tol_event):
        raise GameDomainError(
            f"bupl_switch_check: theta={theta} is not an apex BUP heading")
    phi_d = params.phi_d
    lam_x, lam_y = -math.cos(phi_d), math.sin(phi_d)
    lam_th_dot = lam_x * math.cos(th) - lam_y * math.sin(th)
    nu_e = 1 if lam_th_dot > 0 else -1
    x_dot = -math.sin(th)            # retro rates at the apex, any nu_p
    y_dot = 1.0 - math.cos(th)
    s_dot = y_dot * lam_x - x_dot * lam_y + lam_th_dot
    nu_p = 1 if s_dot > 0 else -1
    return BuplCheck(s_dot, nu_p, nu_e)


# ---------------------------------------------------------------------------
# event detection


def _first_hit_from_scan(g_scalar, taus, gvals, params) -> Optional[float]:
    t_min = taus[0] + params.tol_event
    for k in range(1, len(taus)):
        if gvals[k] < -1e-15:
            if gvals[k - 1] > 0.0:
                root = brentq(g_scalar, taus[k - 1], taus[k], xtol=1e-12)
            else:
                root = taus[k]      # left the cone within the first step
            if root > t_min:
                return float(root)
    return None


def detect_boundary_hit(evaluate: Callable[[float], CylindricalState],
                        tau_start: float, tau_end: float,
                        params: GameParams) -> Optional[float]:
    """First retro time past tau_start where the state meets |phi| = phi_d.

    Samples at ``scan_dtau`` and refines the crossing by bracketed root
    finding; crossings within tol_event of tau_start are ignored (seeds
    start on the boundary).  Returns None if the arc stays inside over the
    horizon.
    """
    if tau_end <= tau_start:
        return None

    def g(t):
        c = evaluate(t)
        return params.phi_d - abs(c.phi)

    n = max(2, int(math.ceil((tau_end - tau_start) / params.scan_dtau)) + 1)
    taus = np.linspace(tau_start, tau_end, n)
    gvals = np.array([g(t) for t in taus])
    return _first_hit_from_scan(g, taus, gvals, params)


def _segment_events(anchor, anchor_costate, tau_a, nu_p, nu_e,
                    lam_ref, params):
    """(tau_hit, switch_record) on [tau_a, tau_max], either possibly None."""
    phi_d = params.phi_d
    psi_a = math.atan2(anchor_costate.lambda_y, -anchor_costate.lambda_x)
    theta_ref, tau_ref = lam_ref

    def xyth(taus):
        return _arc_xyth(taus, tau_a, anchor.r, anchor.phi, anchor.theta,
                         nu_p, nu_e)

    def g_scalar(t):
        x, y, _ = xyth(t)
        return phi_d - abs(math.atan2(float(x), float(y)))

    def evaluate(t):
        x, y, theta = xyth(t)
        lam_x, lam_y, lam_th = _arc_costate(t, tau_a, psi_a, nu_p, nu_e,
                                            phi_d, theta_ref, tau_ref)
        return _cyl(x, y, theta), Costate(float(lam_x), float(lam_y),
                                          float(lam_th))

    n = max(2, int(math.ceil((params.tau_max - tau_a) / params.scan_dtau)) + 1)
    taus = np.linspace(tau_a, params.tau_max, n)
    x, y, _ = xyth(taus)
    gvals = phi_d - np.abs(np.arctan2(x, y))
    tau_hit = _first_hit_from_scan(g_scalar, taus, gvals, params)

    lam_x, lam_y, lam_th = _arc_costate(taus, tau_a, psi_a, nu_p, nu_e,
                                        phi_d, theta_ref, tau_ref)
    svals = y * lam_x - x * lam_y + lam_th
    switch = _record_from_scan(evaluate, taus, svals, params)
    return tau_hit, switch


# ---------------------------------------------------------------------------
# mirroring


def mirror_cylindrical(c: CylindricalState) -> CylindricalState:
    return CylindricalState(c.r, -c.phi, wrap_angle(-c.theta))


def mirror_costate(lam: Costate) -> Costate:
    return Costate(-lam.lambda_x, lam.lambda_y, -lam.lambda_theta)


_MIRROR_FAMILY = {FamilyTag.TRIBUTARY_LEFT: FamilyTag.TRIBUTARY_RIGHT,
                  FamilyTag.TRIBUTARY_RIGHT: FamilyTag.TRIBUTARY_LEFT}


def mirror_segment(seg: TrajectorySegment) -> TrajectorySegment:
    # the lambda_theta law mirrors onto the same template with reference
    # heading 2*phi_d - pi - theta_ref and negated nu_e (exact identity)
    return replace(
        seg,
        family=_MIRROR_FAMILY.get(seg.family, seg.family),
        anchor_state=mirror_cylindrical(seg.anchor_state),
        anchor_costate=mirror_costate(seg.anchor_costate),
        nu_p=-seg.nu_p,
        nu_e=-seg.nu_e,
        lam_theta_ref=wrap_angle(2.0 * seg.phi_d - math.pi - seg.lam_theta_ref),
    )


def mirror_trajectory(traj: Trajectory) -> Trajectory:
    return Trajectory(mirror_seed(traj.seed),
                      tuple(mirror_segment(s) for s in traj.segments),
                      traj.total_tau, traj.params)


# ---------------------------------------------------------------------------
# synthesis


def synthesize(seed: Seed, params: GameParams,
               branch: Optional[EusBranch] = None) -> Trajectory:
    """Retro-time trajectory from a terminal seed until its first
    boundary re-encounter, composed across pursuer switches.

    Seeds at the universal-surface heading get the EUS arc; such seeds may
    carry an ``EusBranch`` that leaves the surface onto a tributary at a
    chosen retro time.  Left-side seeds are synthesized by mirroring.
    """
    if seed.side is BoundarySide.LEFT:
        mirrored = EusBranch(branch.tau_us, -branch.nu_e) if branch else None
        return mirror_trajectory(
            synthesize(mirror_seed(seed), params, mirrored))

    if seed.r <= 0.0:
        raise GameDomainError("synthesize: seed radius must be positive "
                              "(apex seeds carry no trajectory)")
    bound = seed_radius_bound(seed, params)
    if seed.r > bound + 1e-9:
        raise GameDomainError(
            f"synthesize: seed r={seed.r} exceeds the boundary-of-UP radius {bound}")

    nu_e0 = float(terminal_evader_control(seed.theta_d, params))
    if branch is not None and nu_e0 != 0.0:
        raise GameDomainError(
            "synthesize: tributary branches only exist on universal-surface seeds")

    if nu_e0 == 0.0:
        family = FamilyTag.EUS
    elif seed.kind is SeedKind.BUP:
        family = FamilyTag.BARRIER_PRIMARY
    else:
        family = FamilyTag.PRIMARY

    phi_d = params.phi_d
    # right boundary: S(0) = -r < 0, so the pursuer opens with nu_p = -1
    nu_p = -1.0
    nu_e = nu_e0
    anchor = CylindricalState(seed.r, phi_d, seed.theta_d)
    anchor_costate = Costate(-math.cos(phi_d), math.sin(phi_d), 0.0)
    tau_a = 0.0
    lam_ref = (seed.theta_d, 0.0)
    branch_pending = branch

    segments = []
    for _ in range(12):
        if tau_a >= params.tau_max - 1e-12:
            segments.append(_freeze(family, anchor, anchor_costate, tau_a,
                                    nu_p, nu_e, tau_a,
                                    Termination.HORIZON_REACHED, phi_d, lam_ref))
            break
        tau_hit, switch = _segment_events(anchor, anchor_costate, tau_a,
                                          nu_p, nu_e, lam_ref, params)
        tau_sw = switch.tau_s if switch is not None else None

        cut = None
        if branch_pending is not None and family is FamilyTag.EUS:
            t_b = branch_pending.tau_us
            first_event = min([t for t in (tau_hit, tau_sw) if t is not None],
                              default=params.tau_max)
            if t_b <= tau_a:
                raise GameDomainError(
                    f"branch time tau_us={t_b} precedes the surface anchor {tau_a}")
            if t_b <= first_event + params.tol_event and t_b <= params.tau_max:
                cut = ("branch", t_b)
            elif tau_sw is not None and tau_sw == first_event:
                # the pursuer switches on the surface before the branch;
                # flip and keep the branch pending
                cut = ("switch", tau_sw)
            else:
                raise GameDomainError(
                    f"branch time tau_us={t_b} lies beyond the surface's "
                    f"validity (first event at {first_event})")
        if cut is None and tau_hit is not None and (tau_sw is None
                                      or tau_hit <= tau_sw + params.tol_event):
            # ties resolve to the boundary hit: it ends the construction
            cut = ("hit", tau_hit)
        elif cut is None and tau_sw is not None:
            cut = ("switch", tau_sw)
        elif cut is None:
            cut = ("horizon", params.tau_max)

        kind, tau_cut = cut
        term = {"hit": Termination.BOUNDARY_HIT,
                "switch": Termination.PURSUER_SWITCH,
                "horizon": Termination.HORIZON_REACHED,
                "branch": Termination.BRANCH}[kind]
        seg = _freeze(family, anchor, anchor_costate, tau_a, nu_p, nu_e,
                      tau_cut, term, phi_d, lam_ref)
        segments.append(seg)
        if kind in ("hit", "horizon"):
            break
        # re-anchor the continuation at the cut
        anchor = seg.state_at(tau_cut)
        anchor_costate = seg.costate_at(tau_cut)
        tau_a = tau_cut
        if kind == "switch":
            family = _POST_SWITCH_FAMILY[family]
            nu_p = -nu_p
        else:  # branch onto a tributary
            nu_e = branch_pending.nu_e
            family = _TRIBUTARY_BY_NU_E[nu_e]
            lam_ref = (seed.theta_d, tau_cut)
            branch_pending = None
    else:
        raise RuntimeError("synthesize: segment cap exceeded")

    traj = Trajectory(seed, tuple(segments), segments[-1].tau_end, params)
    _assert_continuity(traj)
    return traj


def _freeze(family, anchor, anchor_costate, tau_a, nu_p, nu_e, tau_end,
            termination, phi_d, lam_ref) -> TrajectorySegment:
    return TrajectorySegment(family, anchor, anchor_costate, tau_a, nu_p,
                             nu_e, tau_end, termination, phi_d,
                             lam_ref[0], lam_ref[1])


def _assert_continuity(traj: Trajectory, tol: float = 1e-9):
    for prev, nxt in zip(traj.segments, traj.segments[1:]):
        tau_j = prev.tau_end
        a, b = prev.reduced_at(tau_j), nxt.reduced_at(tau_j)
        da = max(abs(a.x - b.x), abs(a.y - b.y),
                 abs(math.sin(a.theta) - math.sin(b.theta)),
                 abs(math.cos(a.theta) - math.cos(b.theta)))
        la, lb = prev.costate_at(tau_j), nxt.costate_at(tau_j)
        dl = max(abs(la.lambda_x - lb.lambda_x),
                 abs(la.lambda_y - lb.lambda_y),
                 abs(la.lambda_theta - lb.lambda_theta))
        if da > tol or dl > tol:
            raise RuntimeError(
                f"junction discontinuity at tau={tau_j}: state {da}, costate {dl}")


def synthesize_barrier(theta_rb: float, params: GameParams):
    """Barrier trajectory from the boundary-of-UP heading theta_rb.

    Returns (emanation, trajectory).  OUTSIDE seeds yield a stub truncated
    at the (immediate) exit rather than being discarded.
    """
    emanation = barrier_emanation(theta_rb, params)
    seed = Seed(rbup_radius(theta_rb, params), theta_rb,
                BoundarySide.RIGHT, SeedKind.BUP)
    return emanation, synthesize(seed, params)
