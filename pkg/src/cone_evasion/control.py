"""Optimal-control layer: Hamiltonian, bang-bang laws, costate closed forms.

The value-side quantities of the game.  Both players' optimal controls are
signs of linear functionals of the costate: the pursuer plays
``sgn(S)`` with switch function ``S = y*lam_x - x*lam_y + lam_theta``, the
evader plays ``sgn(lam_theta)``.  Along every retro-time trajectory family
the in-plane costate is a pure rotation, ``lam_x = -cos(phi_d - nu_p*tau)``
and ``lam_y = sin(phi_d - nu_p*tau)``, so it keeps unit norm; only
``lam_theta`` depends on the evader's control history.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import GameDomainError
from .kinematics import Controls, CylindricalState, GameParams, ReducedState


@dataclass(frozen=True)
class Costate:
    """Adjoint vector carried along a retro-time trajectory."""

    lambda_x: float
    lambda_y: float
    lambda_theta: float


@dataclass(frozen=True)
class SwitchRecord:
    """Where and when the pursuer's optimal control changes sign."""

    tau_s: float
    nu_p_before: float
    nu_p_after: float
    state_at_switch: CylindricalState
    costate_at_switch: Costate


def _sgn(v: float, zero_tol: float = 0.0) -> int:
    if v > zero_tol:
        return 1
    if v < -zero_tol:
        return -1
    return 0


def hamiltonian(s: ReducedState, lam: Costate, u: Controls) -> float:
    """Minimum-time Hamiltonian in reduced Cartesian coordinates."""
    return (lam.lambda_x * (u.nu_p * s.y + math.sin(s.theta))
            + lam.lambda_y * (-u.nu_p * s.x - 1.0 + math.cos(s.theta))
            + lam.lambda_theta * (u.nu_p - u.nu_e)
            + 1.0)


def switch_function(s: ReducedState, lam: Costate) -> float:
    """Coefficient of the pursuer's control in the Hamiltonian."""
    return s.y * lam.lambda_x - s.x * lam.lambda_y + lam.lambda_theta


def pursuer_control(s: ReducedState, lam: Costate, zero_tol: float = 0.0) -> int:
    """sgn(S); 0 flags a singular candidate rather than defaulting to +-1."""
    return _sgn(switch_function(s, lam), zero_tol)


def evader_control(lam: Costate, zero_tol: float = 0.0) -> int:
    """sgn(lambda_theta); 0 flags a singular candidate (universal surface)."""
    return _sgn(lam.lambda_theta, zero_tol)


def terminal_evader_control(theta_d: float, params: GameParams) -> int:
    """Evader control immediately before the game's end at heading theta_d.

    Determined by the sign of the retro derivative of lambda_theta at tau=0,
    which is -cos(phi_d - theta_d): -1 below theta_d = phi_d + pi/2, +1
    above, and 0 exactly there (the universal-surface candidate).
    """
    if not -params.tol_event <= theta_d <= params.theta_rbup_max + params.tol_event:
        raise GameDomainError(
            f"terminal_evader_control: theta_d={theta_d} outside [0, pi + 2*phi_d]")
    if abs(theta_d - params.theta_eus) <= params.tol_event:
        return 0
    return -1 if theta_d < params.theta_eus else 1


# ---------------------------------------------------------------------------
# costate closed forms


def costate_primary(tau: float, theta_d: float, nu_p: float, nu_e: float,
                    params: GameParams) -> Costate:
    """Costate along a trajectory anchored at the usable part.

    At tau = 0 this is the traversability value (-cos phi_d, sin phi_d, 0);
    nu_e = 0 collapses lambda_theta to zero (the universal-surface case).
    """
    phi_d = params.phi_d
    return Costate(
        -math.cos(phi_d - nu_p * tau),
        math.sin(phi_d - nu_p * tau),
        nu_e * (-math.sin(phi_d - theta_d)
                + math.sin(phi_d - theta_d - nu_e * tau)),
    )


def costate_us(tau: float, nu_p: float, params: GameParams) -> Costate:
    """Costate on the evader's universal surface: lambda_theta is 0."""
    phi_d = params.phi_d
    return Costate(-math.cos(phi_d - nu_p * tau),
                   math.sin(phi_d - nu_p * tau), 0.0)


def costate_tributary(tau: float, tau_us: float, theta_d: float, nu_p: float,
                      nu_e: float, params: GameParams) -> Costate:
    """Costate on a tributary that left the universal surface at tau_us."""
    if tau < tau_us - 1e-12:
        raise GameDomainError(
            f"costate_tributary: tau={tau} precedes the junction tau_us={tau_us}")
    phi_d = params.phi_d
    return Costate(
        -math.cos(phi_d - nu_p * tau),
        math.sin(phi_d - nu_p * tau),
        nu_e * (-math.sin(phi_d - theta_d)
                + math.sin(phi_d - theta_d - nu_e * (tau - tau_us))),
    )


def costate_post_switch(tau: float, tau_s: float, nu_p0: float, nu_p: float,
                        theta_d: float, nu_e: float,
                        params: GameParams) -> Costate:
    """Costate after the pursuer's switch at tau_s (nu_p0 before, nu_p after).

    The in-plane rotation picks up the phase accumulated before the switch;
    lambda_theta is untouched by a pursuer switch and keeps its law in
    total retro time.
    """
    if tau < tau_s - 1e-12:
        raise GameDomainError(
            f"costate_post_switch: tau={tau} precedes the switch tau_s={tau_s}")
    phi_d = params.phi_d
    phase = phi_d - nu_p0 * tau_s - nu_p * (tau - tau_s)
    return Costate(
        -math.cos(phase),
        math.sin(phase),
        nu_e * (-math.sin(phi_d - theta_d)
                + math.sin(phi_d - theta_d - nu_e * tau)),
    )


# ---------------------------------------------------------------------------
# switch detection

SegmentEvaluator = Callable[[float], "tuple[CylindricalState, Costate]"]


def _switch_value(evaluate: SegmentEvaluator, tau: float) -> float:
    c, lam = evaluate(tau)
    x = c.r * math.sin(c.phi)
    y = c.r * math.cos(c.phi)
    return y * lam.lambda_x - x * lam.lambda_y + lam.lambda_theta


def find_switch_time(evaluate: SegmentEvaluator, tau_start: float,
                     tau_end: float, params: GameParams) -> Optional[SwitchRecord]:
    """First sign change of the switch function S on [tau_start, tau_end].

    Scans at ``params.scan_dtau``, brackets the first sign change, and
    refines the root until |S| < tol_root.  Returns None when S keeps its
    sign over the horizon (a valid outcome).  Leading samples with
    |S| <= tol_root are skipped so a segment anchored exactly at a switch
    (S = 0) does not re-report it.
    """
    if tau_end <= tau_start:
        return None
    n = max(2, int(math.ceil((tau_end - tau_start) / params.scan_dtau)) + 1)
    taus = np.linspace(tau_start, tau_end, n)
    svals = np.array([_switch_value(evaluate, t) for t in taus])
    return _record_from_scan(evaluate, taus, svals, params)


def _record_from_scan(evaluate, taus, svals, params) -> Optional[SwitchRecord]:
    # first sample carrying a definite sign
    k0 = None
    for k, s in enumerate(svals):
        if abs(s) > params.tol_root:
            k0 = k
            break
    if k0 is None:
        return None
    ref = 1.0 if svals[k0] > 0 else -1.0
    hit = None
    for k in range(k0 + 1, len(taus)):
        if svals[k] * ref < 0.0:
            hit = k
            break
    if hit is None:
        return None
    f = lambda t: _switch_value(evaluate, t)
    a = taus[hit - 1] if svals[hit - 1] * ref > 0.0 else taus[k0]
    tau_s = brentq(f, a, taus[hit], xtol=1e-14, rtol=8.9e-16)
    if abs(f(tau_s)) > params.tol_root:
        raise RuntimeError(
            f"switch root refinement stalled: |S({tau_s})| > tol_root")
    state, costate = evaluate(tau_s)
    return SwitchRecord(tau_s, ref, -ref, state, costate)
