import json
import math

import pytest

from cone_evasion.cli import main
from cone_evasion.output import read_table

DEG = math.radians


def run_cli(*argv):
    return main(list(argv))


class TestUpCommand:
    def test_bup_table_geometry(self, tmp_path):
        out = tmp_path / "up"
        assert run_cli("up", "--out", str(out), "--seeds-theta", "52") == 0
        sha, cols, rows = read_table(out / "bup.csv")
        assert cols == ["side", "theta", "r"]
        right = [(r[1], r[2]) for r in rows if r[0] == "right"]
        rmax = max(right, key=lambda p: p[1])
        assert abs(rmax[1] - 1.6427876096865393) < 1e-12
        assert abs(rmax[0] - DEG(130)) < 1e-12
        # apex zeros at both ends of the heading interval
        assert abs(right[0][1]) < 1e-12 and abs(right[-1][1]) < 1e-12
        assert abs(right[0][0]) < 1e-12
        assert abs(right[-1][0] - DEG(260)) < 1e-12

    def test_output_reparses(self, tmp_path):
        out = tmp_path / "up"
        assert run_cli("up", "--out", str(out), "--format", "json") == 0
        sha, cols, rows = read_table(out / "bup.json")
        assert sha and len(rows) > 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config_sha256"] == sha
        for entry in manifest["files"]:
            assert (out / entry["file"]).exists()


class TestSynthCommand:
    def test_family_census(self, tmp_path):
        out = tmp_path / "synth"
        assert run_cli("synth", "--out", str(out), "--seeds-theta", "12",
                       "--seeds-r", "3") == 0
        manifest = json.loads((out / "manifest.json").read_text())
        families = set()
        for entry in manifest["files"]:
            families.update(entry.get("families", []))
        seed_grid = [e for e in manifest["files"]
                     if e.get("kind") == "seed-grid"]
        assert seed_grid and seed_grid[0]["rows"] > 0
        switched = [e for e in manifest["files"] if e.get("switches")]
        assert switched  # switch records are serialized alongside
        assert {"primary", "eus", "tributary-left", "tributary-right",
                "post-ts-primary"} <= families

    def test_exported_rows_revalidate(self, tmp_path):
        out = tmp_path / "synth"
        assert run_cli("synth", "--out", str(out), "--seeds-theta", "6",
                       "--seeds-r", "2") == 0
        manifest = json.loads((out / "manifest.json").read_text())
        checked = 0
        for entry in manifest["files"]:
            if "families" not in entry:
                continue
            sha, cols, rows = read_table(out / entry["file"])
            assert len(rows) == entry["rows"]
            for a, b in zip(rows, rows[1:]):
                if abs(a[0] - b[0]) < 1e-12 and a[-1] != b[-1]:
                    # duplicated junction rows agree in state
                    assert max(abs(a[i] - b[i]) for i in range(1, 6)) < 1e-9
                    checked += 1
        assert checked > 0

    def test_empty_grid(self, tmp_path):
        out = tmp_path / "synth0"
        assert run_cli("synth", "--out", str(out), "--seeds-theta", "0",
                       "--seeds-r", "0") == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["files"] == []

    def test_determinism(self, tmp_path):
        out = tmp_path / "det"
        args = ("synth", "--out", str(out), "--seeds-theta", "4",
                "--seeds-r", "2")
        assert run_cli(*args) == 0
        first = {f.name: f.read_bytes() for f in sorted(out.iterdir())}
        assert run_cli(*args) == 0
        second = {f.name: f.read_bytes() for f in sorted(out.iterdir())}
        assert first == second


class TestBarrierCommand:
    def test_census_and_stubs(self, tmp_path):
        out = tmp_path / "bar"
        assert run_cli("barrier", "--out", str(out), "--seeds-theta",
                       "26") == 0
        sha, cols, rows = read_table(out / "emanation.csv")
        assert len(rows) == 26
        for theta_rb, theta_deg, emanation in rows:
            want = "inside" if theta_deg < 80.0 else "outside"
            assert emanation == want
        manifest = json.loads((out / "manifest.json").read_text())
        stubs = [e for e in manifest["files"]
                 if e.get("emanation") == "outside" and "total_tau" in e]
        assert stubs and all(e["total_tau"] < 0.01 for e in stubs)


class TestSimulateCommand:
    def test_bundled_sim1(self, tmp_path):
        out = tmp_path / "sim"
        assert run_cli("simulate", "--scenario", "sim1", "--out",
                       str(out)) == 0
        summary = json.loads((out / "sim_summary.json").read_text())
        assert summary["escaped"] is True
        assert summary["segments"][0]["family"] == "primary"
        sha, cols, rows = read_table(out / "sim_snapshots.csv")
        assert cols[0] == "t" and len(rows) >= 2

    def test_bundled_sim3_escape_time(self, tmp_path):
        out = tmp_path / "sim3"
        assert run_cli("simulate", "--scenario", "sim3", "--out",
                       str(out)) == 0
        summary = json.loads((out / "sim_summary.json").read_text())
        assert abs(summary["escape_time"] - 3.04) < 0.02
        assert [s["family"] for s in summary["segments"]] == [
            "primary", "post-ts-primary"]

    def test_missing_scenario(self, tmp_path):
        assert run_cli("simulate", "--scenario", "sim99", "--out",
                       str(tmp_path)) == 2


class TestConfigHandling:
    def test_bad_config_exit_2(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"phi_d_degrees": 120.0}))
        assert run_cli("up", "--config", str(cfg), "--out",
                       str(tmp_path / "o")) == 2

    def test_unknown_key_exit_2(self, tmp_path):
        cfg = tmp_path / "bad2.json"
        cfg.write_text(json.dumps({"no_such_key": 1}))
        assert run_cli("up", "--config", str(cfg)) == 2

    def test_flags_override_file(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"phi_d_degrees": 30.0,
                                   "seed_grid": {"n_theta": 4, "n_r": 1}}))
        out = tmp_path / "o"
        assert run_cli("up", "--config", str(cfg), "--phi-d-degrees", "40",
                       "--out", str(out)) == 0
        _, _, rows = read_table(out / "bup.csv")
        right = [r for r in rows if r[0] == "right"]
        # interval end pi + 2*phi_d reflects the flag value, not the file's
        assert abs(right[-1][1] - DEG(260)) < 1e-12

    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("nonsense")
        assert exc.value.code == 2
