#!/usr/bin/env python3
"""Recover the bundled scenario parameters from the target escape times.

The escape times 3.04 s / 1.58 s / 1.36 s pin down the seed parameters
the scenario narratives leave free:

* sim3: a single radius r with total_tau(r) = 3.04 (Brent on [0.2, 0.3]);
* sim4/sim5: one shared universal-surface branch point.  Inner search:
  tau_us makes the nu_e = -1 tributary total 1.58 for a candidate radius;
  outer search: the radius makes the nu_e = +1 tributary total 1.36.

Running this script reprints the values frozen into
src/cone_evasion/scenarios/sim{3,4,5}.json.
"""

import math

from scipy.optimize import brentq

from cone_evasion import EusBranch, GameParams, Seed, synthesize

PARAMS = GameParams(phi_d=math.radians(40.0))


def sim3_total_tau(r: float) -> float:
    return synthesize(Seed(r, math.radians(120.0)), PARAMS).total_tau


def tributary_total_tau(r_d: float, tau_us: float, nu_e: float) -> float:
    seed = Seed(r_d, PARAMS.theta_eus)
    return synthesize(seed, PARAMS, EusBranch(tau_us, nu_e)).total_tau


def main():
    r3 = brentq(lambda r: sim3_total_tau(r) - 3.04, 0.2, 0.3, xtol=1e-13)
    print(f"sim3: seed_r = {r3!r}  (total_tau = {sim3_total_tau(r3):.12f})")

    def tau_us_for_green(r_d):
        return brentq(lambda tu: tributary_total_tau(r_d, tu, -1.0) - 1.58,
                      0.05, 1.3, xtol=1e-13)

    def yellow_residual(r_d):
        return tributary_total_tau(r_d, tau_us_for_green(r_d), 1.0) - 1.36

    r45 = brentq(yellow_residual, 0.10, 0.20, xtol=1e-13)
    tau_us = tau_us_for_green(r45)
    print(f"sim4/sim5: seed_r = {r45!r}, tau_us = {tau_us!r}")
    print(f"  nu_e=-1 total: {tributary_total_tau(r45, tau_us, -1.0):.12f}")
    print(f"  nu_e=+1 total: {tributary_total_tau(r45, tau_us, +1.0):.12f}")


if __name__ == "__main__":
    main()
