import json
import math

import numpy as np
import pytest

from cone_evasion import (Controls, EusBranch, RealisticState, Scenario,
                          Seed, SimResult, cross_validate, load_scenario,
                          replay, rk4_integrate, run_scenario, synthesize,
                          to_reduced)
from cone_evasion.errors import ScenarioError
from cone_evasion.kinematics import wrap_signed
from cone_evasion.simulate import bundled_scenario_path

DEG = math.radians


class TestRk4:
    def test_linear_ode_exact(self):
        dyn = lambda y, u: np.array([u.nu_p])
        times, states = rk4_integrate(dyn, [0.0], [(0.0, Controls(1, 0))],
                                      (0.0, math.pi), 1e-3)
        assert abs(states[-1, 0] - math.pi) < 1e-10

    def test_unit_circle_closes(self):
        def dyn(y, u):
            return np.array([math.cos(y[2]), math.sin(y[2]), u.nu_p])
        times, states = rk4_integrate(dyn, [0.0, 0.0, 0.0],
                                      [(0.0, Controls(1, 0))],
                                      (0.0, 2 * math.pi), 1e-3)
        assert np.max(np.abs(states[-1] - [0.0, 0.0, 2 * math.pi])) < 1e-8

    def test_fourth_order_convergence(self):
        def dyn(y, u):
            return np.array([math.cos(y[2]), math.sin(y[2]), u.nu_p])
        exact = np.array([math.sin(1.0), 1.0 - math.cos(1.0), 1.0])
        errs = []
        for dt in (2e-2, 1e-2):
            _, states = rk4_integrate(dyn, [0.0, 0.0, 0.0],
                                      [(0.0, Controls(1, 0))], (0.0, 1.0), dt)
            errs.append(np.max(np.abs(states[-1] - exact)))
        ratio = errs[0] / errs[1]
        assert 10.0 < ratio < 22.0  # ~16x for a 4th-order scheme

    def test_step_splitting_at_switches(self):
        dyn = lambda y, u: np.array([u.nu_p])
        sched = [(0.0, Controls(1, 0)), (0.35, Controls(-1, 0))]
        _, states = rk4_integrate(dyn, [0.0], sched, (0.0, 1.0), 0.1)
        assert abs(states[-1, 0] - (0.35 - 0.65)) < 1e-12


class TestReplay:
    def test_sim1_right_boundary_exit(self, params):
        traj = synthesize(Seed(0.8, DEG(120)), params)
        res = replay(traj, dt=1e-3)
        assert res.escaped
        assert res.escape_time == traj.total_tau
        # the terminal reduced state crosses the right boundary escapably
        final = res.reduced_path[-1]
        phi = math.atan2(final[0], final[1])
        assert abs(phi - params.phi_d) < 1e-9

    def test_replay_consistency(self, params):
        # numerically integrated realistic play reproduces the closed-form
        # reduced state through the frame change
        traj = synthesize(Seed(0.25, DEG(120)), params)
        res = replay(traj, dt=1e-4)
        worst = 0.0
        for i in range(0, res.times.size, 1000):
            s = RealisticState(*res.pursuer_path[i], *res.evader_path[i])
            red = to_reduced(s)
            cf = res.reduced_path[i]
            worst = max(worst, abs(red.x - cf[0]), abs(red.y - cf[1]),
                        abs(wrap_signed(red.theta - cf[2])))
        assert worst < 1e-5

    def test_unit_speeds(self, params):
        traj = synthesize(Seed(0.8, DEG(120)), params)
        res = replay(traj, dt=1e-3)
        for path in (res.pursuer_path, res.evader_path):
            d = np.diff(path[:, :2], axis=0)
            dt_ = np.diff(res.times)
            speeds = np.hypot(d[:, 0], d[:, 1]) / dt_
            assert np.max(np.abs(speeds - 1.0)) < 1e-5

    def test_time_reversal_identity(self, params):
        traj = synthesize(Seed(0.6, DEG(140)), params)
        res = replay(traj, dt=1e-3)
        assert res.escape_time == traj.total_tau

    def test_escape_monotone_at_the_end(self, params):
        # phi climbs strictly through the right boundary over the last
        # stretch of forward time
        for seed in (Seed(0.8, DEG(120)), Seed(0.25, DEG(120))):
            traj = synthesize(seed, params)
            res = replay(traj, dt=1e-3)
            tail = res.reduced_path[res.times > res.escape_time - 0.05]
            phi = np.arctan2(tail[:, 0], tail[:, 1])
            assert np.all(np.diff(phi) > 0)

    def test_control_schedule_reversed(self, params):
        traj = synthesize(Seed(0.25, DEG(120)), params)
        assert len(traj.segments) == 2
        res = replay(traj, dt=1e-3)
        tau_s = traj.segments[0].tau_end
        t_switch = traj.total_tau - tau_s
        before = res.control_log[res.times < t_switch - 1e-6]
        after = res.control_log[res.times > t_switch + 1e-6]
        assert np.all(before[:, 0] == 1.0)   # post-switch arc plays first
        assert np.all(after[:, 0] == -1.0)


class TestCrossValidate:
    def test_primary_and_eus_deviation(self, params):
        for seed, branch in ((Seed(0.8, DEG(120)), None),
                             (Seed(0.5, params.theta_eus),
                              EusBranch(0.4, 1.0))):
            traj = synthesize(seed, params, branch)
            report = cross_validate(traj, dt=1e-3)
            assert report["max_deviation"] < 1e-6

    def test_deviation_shrinks_with_dt(self, params):
        traj = synthesize(Seed(0.8, DEG(120)), params)
        coarse = cross_validate(traj, dt=2e-2)["max_deviation"]
        fine = cross_validate(traj, dt=1e-2)["max_deviation"]
        assert coarse / fine > 8.0  # ~16x for 4th order


class TestScenarios:
    def test_bundled_scenarios_load(self):
        for name in ("sim1", "sim2", "sim3", "sim4", "sim5"):
            sc = load_scenario(bundled_scenario_path(name))
            assert sc.seed.r > 0

    def test_run_scenario_smoke(self):
        sc = load_scenario(bundled_scenario_path("sim1"))
        res = run_scenario(sc)
        assert isinstance(res, SimResult)
        assert res.escaped

    def test_parse_error_cites_line(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"phi_d_degrees": 40.0,\n  "broken"\n}')
        with pytest.raises(ScenarioError, match="line"):
            load_scenario(p)

    def test_missing_field_cited(self, tmp_path):
        p = tmp_path / "missing.json"
        p.write_text(json.dumps({"phi_d_degrees": 40.0}))
        with pytest.raises(ScenarioError, match="seed_r"):
            load_scenario(p)

    def test_realistic_state_rejected(self, tmp_path):
        p = tmp_path / "realistic.json"
        p.write_text(json.dumps({"phi_d_degrees": 40.0,
                                 "realistic_state": [0, 0, 0, 1, 1, 0]}))
        with pytest.raises(ScenarioError, match="not supported"):
            load_scenario(p)

    def test_unknown_bundled_name(self):
        with pytest.raises(ScenarioError):
            bundled_scenario_path("sim99")
