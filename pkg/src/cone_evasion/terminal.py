"""Terminal manifold of the game: usable part, its boundary, and seeds.

The game ends when the evader crosses the cone boundary ``|phi| = phi_d``
at a configuration from which the pursuer cannot prevent the crossing.
Those configurations form the usable part (UP).  On the right boundary
(``phi = +phi_d``) the UP is ``r < sin(theta - phi_d) + sin(phi_d)`` and
its boundary (RBUP) is the equality case; the left side mirrors it.  The
apex line ``r = 0`` carries the UPL, whose right and left portions overlap
for ``theta`` in ``(pi - 2 phi_d, pi + 2 phi_d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import BoundaryMismatchError, GameDomainError
from .kinematics import TWO_PI, CylindricalState, GameParams, wrap_angle


class BoundarySide(Enum):
    RIGHT = "right"
    LEFT = "left"


class SeedKind(Enum):
    UP_INTERIOR = "up-interior"
    BUP = "bup"


class TerminalClass(Enum):
    RUP = "rup"
    LUP = "lup"
    BOTH_UPL = "both-upl"
    RBUP = "rbup"
    LBUP = "lbup"
    NON_USABLE_BOUNDARY = "non-usable-boundary"
    INTERIOR = "interior"
    OUTSIDE = "outside"


class UplMembership(Enum):
    RUPL_ONLY = "rupl-only"
    LUPL_ONLY = "lupl-only"
    BOTH = "both"
    NEITHER = "neither"


@dataclass(frozen=True)
class Seed:
    """Terminal configuration used to anchor a retro-time integration.

    ``r`` and ``theta_d`` are the boundary radius and heading difference at
    the game's end; ``side`` names the cone boundary; ``kind`` distinguishes
    usable-part interiors (optimal-play trajectories) from boundary-of-UP
    seeds (barrier trajectories).
    """

    r: float
    theta_d: float
    side: BoundarySide = BoundarySide.RIGHT
    kind: SeedKind = SeedKind.UP_INTERIOR


def rbup_radius(theta: float, params: GameParams) -> float:
    """Radius of the right boundary of the usable part at heading ``theta``.

    Defined for theta in [0, pi + 2 phi_d]; zero exactly at the endpoints
    and maximal (1 + sin phi_d) at theta = pi/2 + phi_d.
    """
    if not -1e-12 <= theta <= params.theta_rbup_max + 1e-12:
        raise GameDomainError(
            f"rbup_radius: theta={theta} outside [0, pi + 2*phi_d]")
    return math.sin(theta - params.phi_d) + math.sin(params.phi_d)


def lbup_radius(theta: float, params: GameParams) -> float:
    """Left-boundary mirror of :func:`rbup_radius`, on [pi - 2 phi_d, 2 pi]."""
    lo = math.pi - 2.0 * params.phi_d
    if not lo - 1e-12 <= theta <= TWO_PI + 1e-12:
        raise GameDomainError(
            f"lbup_radius: theta={theta} outside [pi - 2*phi_d, 2*pi]")
    return -math.sin(theta + params.phi_d) + math.sin(params.phi_d)


def _rup_gap(c: CylindricalState, params: GameParams) -> float:
    # rbup radius minus r, using the raw expression (negative values mark
    # the empty-RUP heading range, no domain error wanted here)
    return math.sin(c.theta - params.phi_d) + math.sin(params.phi_d) - c.r


def _lup_gap(c: CylindricalState, params: GameParams) -> float:
    return -math.sin(c.theta + params.phi_d) + math.sin(params.phi_d) - c.r


def in_rup(c: CylindricalState, params: GameParams) -> bool:
    """Strict usable-part membership on the right cone boundary."""
    if abs(c.phi - params.phi_d) >= params.tol_event:
        raise BoundaryMismatchError(
            f"in_rup queried off the right boundary: phi={c.phi}")
    return _rup_gap(c, params) > 0.0


def in_lup(c: CylindricalState, params: GameParams) -> bool:
    """Strict usable-part membership on the left cone boundary."""
    if abs(c.phi + params.phi_d) >= params.tol_event:
        raise BoundaryMismatchError(
            f"in_lup queried off the left boundary: phi={c.phi}")
    return _lup_gap(c, params) > 0.0


def upl_membership(theta: float, params: GameParams) -> UplMembership:
    """Escapability of an apex configuration (r = 0) at heading ``theta``.

    Follows the strict inequalities defining RUPL and LUPL; the headings
    where both margins vanish (theta = 0, identified with 2 pi) are
    NEITHER -- they lie on the boundary-of-UP apex points.
    """
    th = wrap_angle(theta)
    tol = params.tol_event
    rupl = math.sin(th - params.phi_d) + math.sin(params.phi_d) > tol
    lupl = -math.sin(th + params.phi_d) + math.sin(params.phi_d) > tol
    if rupl and lupl:
        return UplMembership.BOTH
    if rupl:
        return UplMembership.RUPL_ONLY
    if lupl:
        return UplMembership.LUPL_ONLY
    return UplMembership.NEITHER


def classify(c: CylindricalState, params: GameParams) -> TerminalClass:
    """Exhaustive, mutually exclusive terminal classification of a state.

    Apex states route through :func:`upl_membership`; the doubly-degenerate
    apex heading theta = 0 (== 2 pi) lies on both the right and left
    boundary-of-UP apex sets and is reported as RBUP.
    """
    tol = params.tol_event
    if c.r < tol:
        m = upl_membership(c.theta, params)
        if m is UplMembership.BOTH:
            return TerminalClass.BOTH_UPL
        if m is UplMembership.RUPL_ONLY:
            return TerminalClass.RUP
        if m is UplMembership.LUPL_ONLY:
            return TerminalClass.LUP
        return TerminalClass.RBUP
    if abs(c.phi) > params.phi_d + tol:
        return TerminalClass.OUTSIDE
    if abs(c.phi) < params.phi_d - tol:
        return TerminalClass.INTERIOR
    if c.phi > 0.0:
        gap = _rup_gap(c, params)
        if gap > tol:
            return TerminalClass.RUP
        if gap > -tol:
            return TerminalClass.RBUP
        return TerminalClass.NON_USABLE_BOUNDARY
    gap = _lup_gap(c, params)
    if gap > tol:
        return TerminalClass.LUP
    if gap > -tol:
        return TerminalClass.LBUP
    return TerminalClass.NON_USABLE_BOUNDARY


def seed_radius_bound(seed: Seed, params: GameParams) -> float:
    """Boundary-of-UP radius at the seed's heading, on the seed's side."""
    if seed.side is BoundarySide.RIGHT:
        return rbup_radius(seed.theta_d, params)
    return lbup_radius(seed.theta_d, params)


def mirror_seed(seed: Seed) -> Seed:
    """Reflect a seed across the y-axis (theta -> 2*pi - theta)."""
    side = (BoundarySide.LEFT if seed.side is BoundarySide.RIGHT
            else BoundarySide.RIGHT)
    return Seed(seed.r, wrap_angle(-seed.theta_d), side, seed.kind)


def sample_seeds(params: GameParams, n_theta: int, n_r: int) -> list[Seed]:
    """Midpoint grid of terminal configurations over both cone boundaries.

    For each of ``n_theta`` headings in (0, pi + 2 phi_d): ``n_r`` interior
    seeds at evenly spaced fractions of the boundary radius plus one seed
    exactly on the boundary of the usable part.  Left-side seeds are the
    mirror images of the right-side grid.
    """
    if n_theta < 0 or n_r < 0:
        raise GameDomainError("sample_seeds: grid sizes must be >= 0")
    seeds = []
    span = params.theta_rbup_max
    for i in range(n_theta):
        theta_d = (i + 0.5) * span / n_theta
        r_b = rbup_radius(theta_d, params)
        for j in range(n_r):
            r = (j + 0.5) * r_b / n_r
            seeds.append(Seed(r, theta_d, BoundarySide.RIGHT,
                              SeedKind.UP_INTERIOR))
        seeds.append(Seed(r_b, theta_d, BoundarySide.RIGHT, SeedKind.BUP))
    return seeds + [mirror_seed(s) for s in seeds]
