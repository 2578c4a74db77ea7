import json
import math

import pytest

from cone_evasion.cli import main, cmd_validate
from cone_evasion.config import Config
from cone_evasion.validate import (check_adjoint_ode, check_bupl,
                                   check_continuity, check_emanation,
                                   check_hamiltonian, check_mirror,
                                   check_mirror_dynamics,
                                   check_oracle_equivalence, check_unit_norm,
                                   validation_trajectories)


class TestChecks:
    def test_oracle_equivalence_clean(self, params):
        results = check_oracle_equivalence(params, n_per_family=12, dt=5e-3)
        assert len(results) == 6
        for r in results:
            assert r.passed, f"{r.name}: {r.max_error}"

    def test_oracle_fault_injection(self, params):
        # a 1e-3 perturbation of the closed forms must trip the oracle
        results = check_oracle_equivalence(params, n_per_family=12, dt=5e-3,
                                           inject_offset=1e-3)
        assert any(not r.passed for r in results)

    def test_pontryagin_battery(self, params):
        trajs = validation_trajectories(params, n_theta=6, n_r=2)
        assert check_hamiltonian(trajs).passed
        assert check_unit_norm(trajs).passed
        assert check_adjoint_ode(trajs).passed
        assert check_continuity(trajs).passed

    def test_emanation_and_bupl(self, params):
        assert check_emanation(params, step_degrees=1.0).passed
        assert check_bupl(params).passed

    def test_mirror(self, params):
        assert check_mirror(params, n_seeds=10).passed
        assert check_mirror_dynamics(params, dt=1e-3).passed


class TestValidateCommand:
    def test_clean_run_exit_0(self, tmp_path, capsys):
        config = Config(n_theta=4, n_r=2, output_dir=str(tmp_path / "v"))
        assert cmd_validate(config) == 0
        report = json.loads(
            (tmp_path / "v" / "validation_report.json").read_text())
        assert report["passed"] is True
        assert all(c["passed"] for c in report["checks"])
        # one printed line per check, with the max-error number
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == len(report["checks"])
        assert all("max_error" in ln for ln in lines)

    def test_mixed_provenance_refused(self, tmp_path):
        out = tmp_path / "mixed"
        out.mkdir()
        (out / "traj_0000.csv").write_text(
            "# config_sha256=aaaa\ntau,r,phi,theta,x,y,lambda_x,lambda_y,"
            "lambda_theta,nu_p,nu_e,family\n0,1,0,0,0,1,0,1,0,-1,-1,primary\n")
        (out / "traj_0001.csv").write_text(
            "# config_sha256=bbbb\ntau,r,phi,theta,x,y,lambda_x,lambda_y,"
            "lambda_theta,nu_p,nu_e,family\n0,1,0,0,0,1,0,1,0,-1,-1,primary\n")
        code = main(["validate", "--out", str(tmp_path / "vo"),
                     "--seeds-theta", "2", "--seeds-r", "1",
                     "--check-outputs", str(out)])
        assert code == 2

    def test_corrupted_junction_fails(self, tmp_path):
        from cone_evasion import Seed, synthesize
        from cone_evasion.output import write_trajectory
        out = tmp_path / "corrupt"
        out.mkdir()
        params = Config(n_theta=2, n_r=1).game_params()
        traj = synthesize(Seed(0.25, math.radians(120)), params)
        write_trajectory(out / "traj_0000.csv", traj, "cafe", 0.01)
        text = (out / "traj_0000.csv").read_text().splitlines()
        # find the duplicated-tau junction pair and damage the second row
        rows = [ln for ln in text if not ln.startswith("#")]
        for i in range(2, len(rows)):
            a, b = rows[i - 1].split(","), rows[i].split(",")
            if a[-1] != b[-1] and abs(float(a[0]) - float(b[0])) < 1e-12:
                b[1] = "%.17g" % (float(b[1]) + 1e-3)
                rows[i] = ",".join(b)
                break
        else:
            pytest.fail("no junction row found")
        (out / "traj_0000.csv").write_text(text[0] + "\n"
                                           + "\n".join(rows) + "\n")
        code = main(["validate", "--out", str(tmp_path / "vo2"),
                     "--seeds-theta", "2", "--seeds-r", "1",
                     "--check-outputs", str(out)])
        assert code == 1
