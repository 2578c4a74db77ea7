import math

import pytest

from cone_evasion import (Controls, Costate, CylindricalState, ReducedState,
                          costate_post_switch, costate_primary,
                          costate_tributary, costate_us, evader_control,
                          find_switch_time, hamiltonian, pursuer_control,
                          switch_function, terminal_evader_control)
from cone_evasion.errors import GameDomainError

DEG = math.radians


class TestHamiltonian:
    def test_cost_term_only(self):
        s = ReducedState(0, 0, 0)
        lam = Costate(0, 0, 0)
        assert hamiltonian(s, lam, Controls(1, -1)) == 1.0
        assert hamiltonian(s, lam, Controls(0, 0)) == 1.0

    def test_direct_substitution(self):
        # lam_x*(nu_p*y + sin th) + ... + 1 = 1*(1*2 + 0) + 0 + 0 + 1 = 3
        s = ReducedState(0, 2, 0)
        lam = Costate(1, 0, 0)
        assert hamiltonian(s, lam, Controls(1, 0)) == 3.0

    def test_argmax_consistency(self, params, rng):
        # the bang controls read off the costate do extremize H
        for _ in range(300):
            s = ReducedState(rng.uniform(-2, 2), rng.uniform(-2, 2),
                             rng.uniform(0, 2 * math.pi))
            lam = Costate(rng.normal(), rng.normal(), rng.normal())
            nu_p = pursuer_control(s, lam)
            nu_e = evader_control(lam)
            if nu_p == 0 or nu_e == 0:
                continue
            best = hamiltonian(s, lam, Controls(nu_p, nu_e))
            assert best >= hamiltonian(s, lam, Controls(-nu_p, nu_e)) - 1e-14
            assert best <= hamiltonian(s, lam, Controls(nu_p, -nu_e)) + 1e-14


class TestSwitchFunction:
    def test_terminal_up_value(self, params, rng):
        # at the usable part: S = -r exactly (unit-norm terminal costate)
        lam = Costate(-math.cos(params.phi_d), math.sin(params.phi_d), 0.0)
        for _ in range(100):
            r = rng.uniform(0.01, 1.6)
            s = ReducedState(r * math.sin(params.phi_d),
                             r * math.cos(params.phi_d), rng.uniform(0, 2))
            assert abs(switch_function(s, lam) + r) < 1e-14 * max(1.0, r)
            assert pursuer_control(s, lam) == -1

    def test_apex_with_zero_lambda_theta(self):
        s = ReducedState(0, 0, 2.0)
        assert switch_function(s, Costate(0.3, -0.8, 0.0)) == 0.0
        assert pursuer_control(s, Costate(0.3, -0.8, 0.0)) == 0

    def test_sign_conventions(self):
        s = ReducedState(0, 1, 0)
        assert pursuer_control(s, Costate(-1.5, 0, 0)) == -1
        assert evader_control(Costate(0, 0, 0.3)) == 1
        assert evader_control(Costate(0, 0, 0.0)) == 0


class TestTerminalEvaderControl:
    def test_partition(self, params):
        assert terminal_evader_control(DEG(120), params) == -1
        assert terminal_evader_control(DEG(130), params) == 0
        assert terminal_evader_control(DEG(200), params) == 1

    def test_domain(self, params):
        with pytest.raises(GameDomainError):
            terminal_evader_control(DEG(280), params)


class TestCostateFamilies:
    def test_primary_terminal_value(self, params):
        lam = costate_primary(0.0, DEG(120), -1.0, -1.0, params)
        assert lam.lambda_x == -math.cos(params.phi_d)
        assert lam.lambda_y == math.sin(params.phi_d)
        assert lam.lambda_theta == 0.0

    def test_primary_lambda_theta_rate(self, params, rng):
        # central finite difference at tau = 0 against -cos(phi_d - theta_d)
        h = 1e-6
        for _ in range(50):
            theta_d = rng.uniform(0, math.pi + 2 * params.phi_d)
            nu_e = -1.0 if theta_d < params.theta_eus else 1.0
            lp = costate_primary(h, theta_d, -1.0, nu_e, params)
            lm = costate_primary(-h, theta_d, -1.0, nu_e, params)
            fd = (lp.lambda_theta - lm.lambda_theta) / (2 * h)
            assert abs(fd + math.cos(params.phi_d - theta_d)) < 1e-6

    def test_unit_norm_all_families(self, params, rng):
        for _ in range(200):
            tau = rng.uniform(0, 6)
            for lam in (costate_primary(tau, 1.0, -1.0, 1.0, params),
                        costate_us(tau, -1.0, params),
                        costate_tributary(tau + 1.0, 1.0, params.theta_eus,
                                          -1.0, 1.0, params),
                        costate_post_switch(tau + 1.0, 1.0, -1.0, 1.0, 2.0,
                                            -1.0, params)):
                assert abs(lam.lambda_x ** 2 + lam.lambda_y ** 2 - 1) < 1e-12

    def test_us_lambda_theta_identically_zero(self, params, rng):
        for tau in rng.uniform(0, 6, size=50):
            lam = costate_us(tau, -1.0, params)
            assert lam.lambda_theta == 0.0
            assert evader_control(lam) == 0

    def test_tributary_junction_continuity(self, params):
        tau_us = 0.8
        lam_us = costate_us(tau_us, -1.0, params)
        lam_tr = costate_tributary(tau_us, tau_us, params.theta_eus, -1.0,
                                   1.0, params)
        assert abs(lam_tr.lambda_x - lam_us.lambda_x) < 1e-15
        assert abs(lam_tr.lambda_y - lam_us.lambda_y) < 1e-15
        assert abs(lam_tr.lambda_theta) < 1e-15

    def test_tributary_sign_matches_side(self, params):
        # series: lambda_theta ~ -(tau - tau_us) cos(phi_d - theta_d), so the
        # sign agrees with nu_e whenever -cos(phi_d - theta_d) nu_e > 0
        for theta_d, nu_e in ((DEG(120), -1.0), (DEG(200), 1.0)):
            assert -math.cos(params.phi_d - theta_d) * nu_e > 0
            lam = costate_tributary(0.51, 0.5, theta_d, -1.0, nu_e, params)
            assert math.copysign(1.0, lam.lambda_theta) == nu_e

    def test_tributary_precondition(self, params):
        with pytest.raises(GameDomainError):
            costate_tributary(0.3, 0.5, params.theta_eus, -1.0, 1.0, params)

    def test_post_switch_continuity(self, params):
        tau_s = 1.3
        theta_d = DEG(120)
        before = costate_primary(tau_s, theta_d, -1.0, -1.0, params)
        after = costate_post_switch(tau_s, tau_s, -1.0, 1.0, theta_d, -1.0,
                                    params)
        assert abs(after.lambda_x - before.lambda_x) < 1e-15
        assert abs(after.lambda_y - before.lambda_y) < 1e-15
        assert abs(after.lambda_theta - before.lambda_theta) < 1e-15
        with pytest.raises(GameDomainError):
            costate_post_switch(1.0, tau_s, -1.0, 1.0, theta_d, -1.0, params)

    def test_adjoint_ode_by_finite_differences(self, params, rng):
        # the closed forms satisfy the retro adjoint equation along the
        # primary family's own state
        from cone_evasion.synthesis import _bang_xyth
        h = 1e-5
        for _ in range(50):
            theta_d = rng.uniform(0.2, math.pi + 2 * params.phi_d - 0.2)
            nu_e = -1.0 if theta_d < params.theta_eus else 1.0
            tau = rng.uniform(0.1, 3.0)
            r = 0.5
            _, _, th = _bang_xyth(tau, r, params.phi_d, theta_d, -1.0, nu_e)
            lp = costate_primary(tau + h, theta_d, -1.0, nu_e, params)
            lm = costate_primary(tau - h, theta_d, -1.0, nu_e, params)
            l0 = costate_primary(tau, theta_d, -1.0, nu_e, params)
            assert abs((lp.lambda_x - lm.lambda_x) / (2 * h)
                       - (1.0 * l0.lambda_y)) < 1e-6  # -nu_p*lam_y, nu_p=-1
            assert abs((lp.lambda_y - lm.lambda_y) / (2 * h)
                       - (-1.0 * l0.lambda_x)) < 1e-6
            assert abs((lp.lambda_theta - lm.lambda_theta) / (2 * h)
                       - (l0.lambda_x * math.cos(th)
                          - l0.lambda_y * math.sin(th))) < 1e-6


class TestFindSwitchTime:
    @staticmethod
    def _linear_evaluator(tau):
        # synthetic segment with S(tau) = tau - 0.5
        return (CylindricalState(0.0, 0.0, 0.0),
                Costate(0.0, 0.0, tau - 0.5))

    def test_linear_root(self, params):
        rec = find_switch_time(self._linear_evaluator, 0.0, 1.0, params)
        assert rec is not None
        assert abs(rec.tau_s - 0.5) < params.tol_root * 10
        assert rec.nu_p_before == -1.0 and rec.nu_p_after == 1.0

    def test_constant_sign_returns_none(self, params):
        def evaluator(tau):
            return (CylindricalState(0.0, 0.0, 0.0), Costate(0.0, 0.0, -0.7))
        assert find_switch_time(evaluator, 0.0, 2.0, params) is None

    def test_no_switch_within_horizon_on_real_segment(self, params):
        # constant-heading primary arc: S keeps its sign over this horizon
        # (dense sampling confirms no change before tau = 2)
        from cone_evasion import Seed, synthesize
        import numpy as np
        seg = synthesize(Seed(0.8, DEG(120)), params).segments[0]
        dense = seg.switch_values(np.linspace(0.0, 2.0, 20001))
        assert np.all(dense < 0)

        def evaluator(tau):
            return seg.state_at(tau), seg.costate_at(tau)

        assert find_switch_time(evaluator, 0.0, 2.0, params) is None

    def test_refinement_stable_under_step_halving(self, params):
        import dataclasses
        fine = dataclasses.replace(params, scan_dtau=params.scan_dtau / 2)

        def evaluator(tau):
            return (CylindricalState(0.0, 0.0, 0.0),
                    Costate(0.0, 0.0, math.sin(tau - 1.234)))

        a = find_switch_time(evaluator, 0.0, 3.0, params)
        b = find_switch_time(evaluator, 0.0, 3.0, fine)
        assert abs(a.tau_s - b.tau_s) < 10 * params.tol_root

    def test_sign_change_on_sampled_primary(self, params):
        # the detected switch on the theta_d = 120 deg primary family flips S
        from cone_evasion import Seed, synthesize
        traj = synthesize(Seed(0.25, DEG(120)), params)
        seg = traj.segments[0]
        assert seg.termination.value == "pursuer-switch"
        tau_s = seg.tau_end
        s_before = seg.switch_values(tau_s - 1e-4)
        s_after = seg.switch_values(tau_s + 1e-4)
        assert s_before < 0 < s_after
        assert abs(seg.switch_values(tau_s)) < params.tol_root
