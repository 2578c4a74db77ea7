"""State representations, coordinate transforms, and kinematics.

Two identical Dubins cars with unit speed and unit turn radius move on a
plane.  The pursuer carries a semi-infinite conic detection region of
half-angle ``phi_d`` aligned with its heading.  Three state representations
are used:

* realistic: both planar poses ``(x_p, y_p, theta_p, x_e, y_e, theta_e)``,
  angles counter-clockwise from +x;
* reduced: the evader's pose in a frame fixed to the pursuer with the
  y-axis along the pursuer's heading, ``(x, y, theta)`` with
  ``theta = theta_p - theta_e``;
* cylindrical: ``(r, phi, theta)`` where ``phi`` is measured clockwise
  from the y-axis, so the detection cone is ``|phi| <= phi_d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ApexSingularityError

TWO_PI = 2.0 * math.pi


def wrap_angle(a):
    """Wrap an angle (scalar or array) to [0, 2*pi). Idempotent."""
    return a % TWO_PI


def wrap_signed(a):
    """Wrap an angle (scalar or array) to [-pi, pi)."""
    return (a + math.pi) % TWO_PI - math.pi


def _require_finite(name, *values):
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name}: non-finite field {v!r}")


@dataclass(frozen=True)
class RealisticState:
    """Planar poses of both players. Headings are normalized to [0, 2*pi)."""

    x_p: float
    y_p: float
    theta_p: float
    x_e: float
    y_e: float
    theta_e: float

    def __post_init__(self):
        _require_finite("RealisticState", self.x_p, self.y_p, self.theta_p,
                        self.x_e, self.y_e, self.theta_e)
        object.__setattr__(self, "theta_p", wrap_angle(self.theta_p))
        object.__setattr__(self, "theta_e", wrap_angle(self.theta_e))

    @property
    def pursuer_pose(self):
        return (self.x_p, self.y_p, self.theta_p)

    @property
    def evader_pose(self):
        return (self.x_e, self.y_e, self.theta_e)


@dataclass(frozen=True)
class ReducedState:
    """Evader position and relative heading in the pursuer-fixed frame."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        _require_finite("ReducedState", self.x, self.y, self.theta)
        object.__setattr__(self, "theta", wrap_angle(self.theta))


@dataclass(frozen=True)
class CylindricalState:
    """Polar form of the reduced state; phi is clockwise from the y-axis."""

    r: float
    phi: float
    theta: float

    def __post_init__(self):
        _require_finite("CylindricalState", self.r, self.phi, self.theta)
        if self.r < 0.0:
            raise ValueError(f"CylindricalState: negative radius {self.r}")
        object.__setattr__(self, "phi", wrap_signed(self.phi))
        object.__setattr__(self, "theta", wrap_angle(self.theta))


@dataclass(frozen=True)
class Controls:
    """Turn rates of the two players, each in [-1, 1]."""

    nu_p: float
    nu_e: float

    def __post_init__(self):
        if not (-1.0 <= self.nu_p <= 1.0 and -1.0 <= self.nu_e <= 1.0):
            raise ValueError(f"Controls out of [-1, 1]: ({self.nu_p}, {self.nu_e})")


@dataclass(frozen=True)
class GameParams:
    """Cone half-angle and the numerical knobs shared by every module.

    phi_d      -- cone half-angle, radians, in the open interval (0, pi/2)
    tol_root   -- switch-function root tolerance (|S| at the reported root)
    tol_event  -- event-detection tolerance ("on the boundary" tests)
    tau_max    -- retro-time horizon for synthesis
    scan_dtau  -- sampling step used to bracket events before refinement
    """

    phi_d: float
    tol_root: float = 1e-10
    tol_event: float = 1e-9
    tau_max: float = TWO_PI
    scan_dtau: float = 1e-3

    def __post_init__(self):
        if not 0.0 < self.phi_d < 0.5 * math.pi:
            raise ValueError(f"phi_d must lie in (0, pi/2), got {self.phi_d}")
        for name in ("tol_root", "tol_event", "tau_max", "scan_dtau"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")

    @property
    def theta_rbup_max(self):
        """Upper end of the theta interval carrying the right usable part."""
        return math.pi + 2.0 * self.phi_d

    @property
    def theta_eus(self):
        """Terminal heading difference on the evader's universal surface."""
        return self.phi_d + 0.5 * math.pi


# ---------------------------------------------------------------------------
# coordinate transforms


def to_reduced(s: RealisticState) -> ReducedState:
    """Pursuer-fixed frame coordinates of the evader."""
    dx = s.x_e - s.x_p
    dy = s.y_e - s.y_p
    sp = math.sin(s.theta_p)
    cp = math.cos(s.theta_p)
    return ReducedState(dx * sp - dy * cp, dx * cp + dy * sp,
                        s.theta_p - s.theta_e)


def from_reduced(s: ReducedState, pursuer_pose) -> RealisticState:
    """Inverse of :func:`to_reduced` for a given pursuer pose."""
    x_p, y_p, theta_p = pursuer_pose
    sp = math.sin(theta_p)
    cp = math.cos(theta_p)
    return RealisticState(
        x_p, y_p, theta_p,
        x_p + s.x * sp + s.y * cp,
        y_p + s.y * sp - s.x * cp,
        theta_p - s.theta,
    )


def to_cylindrical(s: ReducedState) -> CylindricalState:
    """Polar form; the apex r = 0 maps to phi = 0 by convention."""
    r = math.hypot(s.x, s.y)
    phi = math.atan2(s.x, s.y) if r > 0.0 else 0.0
    return CylindricalState(r, phi, s.theta)


def from_cylindrical(c: CylindricalState) -> ReducedState:
    return ReducedState(c.r * math.sin(c.phi), c.r * math.cos(c.phi), c.theta)


# ---------------------------------------------------------------------------
# forward dynamics


def realistic_dynamics(s: RealisticState, u: Controls) -> np.ndarray:
    """Time derivative of the realistic state, ordered as the state fields."""
    return np.array([
        math.cos(s.theta_p), math.sin(s.theta_p), u.nu_p,
        math.cos(s.theta_e), math.sin(s.theta_e), u.nu_e,
    ])


def reduced_dynamics(s: ReducedState, u: Controls) -> np.ndarray:
    """Time derivative (xdot, ydot, thetadot) of the reduced state."""
    return np.array([
        u.nu_p * s.y + math.sin(s.theta),
        -u.nu_p * s.x - 1.0 + math.cos(s.theta),
        u.nu_p - u.nu_e,
    ])


def cylindrical_dynamics(c: CylindricalState, u: Controls,
                         r_min: float = 1e-12) -> np.ndarray:
    """Time derivative (rdot, phidot, thetadot); undefined at the apex."""
    if c.r <= r_min:
        raise ApexSingularityError(
            f"cylindrical dynamics undefined for r = {c.r} <= {r_min}")
    return np.array([
        math.cos(c.theta - c.phi) - math.cos(c.phi),
        u.nu_p + (math.sin(c.theta - c.phi) + math.sin(c.phi)) / c.r,
        u.nu_p - u.nu_e,
    ])


def retro_reduced_dynamics(s: ReducedState, u: Controls) -> np.ndarray:
    """Retro-time derivative: exact negation of the forward one."""
    return -reduced_dynamics(s, u)


def retro_cylindrical_dynamics(c: CylindricalState, u: Controls,
                               r_min: float = 1e-12) -> np.ndarray:
    return -cylindrical_dynamics(c, u, r_min)


# ---------------------------------------------------------------------------
# array-level right-hand sides (used by the integrators and batched oracles);
# `xyth` has shape (3,) or (3, n)


def reduced_rhs(xyth, nu_p, nu_e):
    x, y, th = xyth
    dx = nu_p * y + np.sin(th)
    dy = -nu_p * x - 1.0 + np.cos(th)
    dth = np.full_like(np.asarray(dx, dtype=float), nu_p - nu_e)
    return np.stack([np.asarray(dx, dtype=float), np.asarray(dy, dtype=float), dth])


def retro_reduced_rhs(xyth, nu_p, nu_e):
    return -reduced_rhs(xyth, nu_p, nu_e)


def realistic_rhs(state, nu_p, nu_e):
    """state = (x_p, y_p, theta_p, x_e, y_e, theta_e) as an array."""
    return np.array([
        math.cos(state[2]), math.sin(state[2]), nu_p,
        math.cos(state[5]), math.sin(state[5]), nu_e,
    ])
