import math

import numpy as np
import pytest

from cone_evasion import GameParams


@pytest.fixture
def params():
    """Reference parameters: the 40-degree cone used throughout."""
    return GameParams(phi_d=math.radians(40.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def rk4_path(rhs, y0, span, dt):
    """Plain fixed-step RK4 used as an independent integration oracle."""
    y = np.asarray(y0, dtype=float).copy()
    n = int(round(span / dt))
    for _ in range(n):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y
