import json

import numpy as np
import pytest

from indexcoding.cli import main


def run_cli(args):
    return main([str(a) for a in args])


class TestSweepCommand:
    def test_k2_both_solvers(self, tmp_path):
        out = tmp_path / "curve.csv"
        assert run_cli(["sweep", "--K", 2, "--solver", "both", "--seed", 7,
                        "--out", out]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == (
            "rank,sparsity_riemannian,sparsity_altmin,"
            "feasible_riemannian,feasible_altmin,envelope_riemannian"
        )
        assert lines[1] == "1,2,2,true,true,2"
        assert lines[2] == "2,0,0,true,true,0"
        manifest = json.loads((tmp_path / "curve_manifest.json").read_text())
        assert manifest["command"] == "sweep"
        assert len(manifest["per_rank"]) == 2
        assert "seconds" in manifest["per_rank"][0]

    def test_k2_riemannian_only_columns(self, tmp_path):
        out = tmp_path / "r.csv"
        assert run_cli(["sweep", "--K", 2, "--solver", "riemannian", "--seed", 7,
                        "--out", out]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "rank,sparsity_riemannian,feasible_riemannian,envelope_riemannian"
        assert lines[1] == "1,2,true,2"

    def test_rank_subset(self, tmp_path):
        out = tmp_path / "sub.csv"
        assert run_cli(["sweep", "--K", 3, "--solver", "riemannian", "--seed", 7,
                        "--ranks", "2..3", "--out", out]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 3
        assert lines[1].startswith("2,")

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli(["sweep", "--K", 2, "--solver", "both", "--seed", 11, "--out", a])
        run_cli(["sweep", "--K", 2, "--solver", "both", "--seed", 11, "--out", b])
        assert a.read_bytes() == b.read_bytes()

    def test_json_format(self, tmp_path):
        out = tmp_path / "curve.json"
        assert run_cli(["sweep", "--K", 2, "--solver", "riemannian", "--seed", 7,
                        "--format", "json", "--out", out]) == 0
        doc = json.loads(out.read_text())
        assert doc["columns"][0] == "rank"
        assert doc["rows"][0][0] == 1

    def test_invalid_k(self, tmp_path):
        assert run_cli(["sweep", "--K", 0, "--out", tmp_path / "x.csv"]) == 2

    def test_unwritable_path(self):
        assert run_cli(["sweep", "--K", 2, "--solver", "riemannian", "--seed", 7,
                        "--out", "/nonexistent-dir/x.csv"]) == 2

    def test_malformed_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run_cli(["sweep", "--K", "two"])
        assert exc.value.code == 2


class TestSolveCommand:
    def test_full_rank_identity(self, tmp_path):
        out = tmp_path / "sol.json"
        assert run_cli(["solve", "--K", 5, "--rank", 5, "--seed", 7,
                        "--out", out]) == 0
        doc = json.loads(out.read_text())
        assert list(doc.keys()) == [
            "K", "rank", "side_info_amount", "feasible", "X", "pattern",
            "side_info_sets", "sum_rate",
        ]
        assert doc["side_info_amount"] == 0
        assert doc["feasible"] is True
        np.testing.assert_allclose(np.array(doc["X"]), np.eye(5), atol=1e-6)
        assert doc["sum_rate"] == pytest.approx(1.0)
        assert doc["side_info_sets"] == [[], [], [], [], []]

    def test_rank_one_k2(self, tmp_path):
        out = tmp_path / "sol.json"
        assert run_cli(["solve", "--K", 2, "--rank", 1, "--seed", 7,
                        "--out", out]) == 0
        doc = json.loads(out.read_text())
        assert doc["side_info_amount"] == 2
        assert doc["side_info_sets"] == [[2], [1]]
        assert doc["sum_rate"] == pytest.approx(2.0)

    def test_solver_both_rejected(self, tmp_path):
        assert run_cli(["solve", "--K", 2, "--rank", 1, "--solver", "both",
                        "--out", tmp_path / "x.json"]) == 2

    def test_missing_rank_rejected(self, tmp_path):
        assert run_cli(["solve", "--K", 2, "--out", tmp_path / "x.json"]) == 2

    def test_altmin_solver(self, tmp_path):
        out = tmp_path / "sol.json"
        assert run_cli(["solve", "--K", 2, "--rank", 2, "--solver", "altmin",
                        "--seed", 7, "--out", out]) == 0
        doc = json.loads(out.read_text())
        assert doc["side_info_amount"] == 0


class TestVerifyCommand:
    def _solve(self, tmp_path, K=4, rank=4):
        out = tmp_path / "sol.json"
        assert run_cli(["solve", "--K", K, "--rank", rank, "--seed", 7,
                        "--out", out]) == 0
        return out

    def test_round_trip_passes(self, tmp_path, capsys):
        out = self._solve(tmp_path)
        assert run_cli(["verify", out]) == 0
        assert "verification passed" in capsys.readouterr().out

    def test_rank_deficient_instance_round_trip(self, tmp_path):
        out = tmp_path / "sol.json"
        assert run_cli(["solve", "--K", 3, "--rank", 1, "--seed", 7,
                        "--out", out]) == 0
        assert run_cli(["verify", out]) == 0

    def test_injected_violation_fails(self, tmp_path, capsys):
        out = self._solve(tmp_path)
        doc = json.loads(out.read_text())
        # bump one pattern-zero position well above tolerance
        P = np.array(doc["pattern"])
        zi, zj = np.argwhere(P == 0)[0]
        doc["X"][zi][zj] = 1e-2
        out.write_text(json.dumps(doc))
        assert run_cli(["verify", out]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_truncated_json_exits_2(self, tmp_path):
        out = self._solve(tmp_path)
        out.write_text(out.read_text()[:40])
        assert run_cli(["verify", out]) == 2

    def test_missing_file_exits_2(self, tmp_path):
        assert run_cli(["verify", tmp_path / "nope.json"]) == 2

    def test_missing_key_exits_2(self, tmp_path):
        out = self._solve(tmp_path)
        doc = json.loads(out.read_text())
        del doc["pattern"]
        out.write_text(json.dumps(doc))
        assert run_cli(["verify", out]) == 2


class TestConfigFile:
    def test_config_file_and_flag_precedence(self, tmp_path):
        cfg_file = tmp_path / "run.json"
        cfg_file.write_text(json.dumps({"K": 2, "seed": 7, "restarts": 2}))
        out = tmp_path / "c.csv"
        # flag --K overrides file value; file seed applies
        assert run_cli(["sweep", "--config", cfg_file, "--K", 1,
                        "--solver", "riemannian", "--out", out]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2  # header + one rank
        manifest = json.loads((tmp_path / "c_manifest.json").read_text())
        assert manifest["config"]["K"] == 1
        assert manifest["config"]["seed"] == 7
        assert manifest["config"]["restarts"] == 2

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg_file = tmp_path / "bad.json"
        cfg_file.write_text(json.dumps({"bogus": 1}))
        assert run_cli(["sweep", "--config", cfg_file, "--K", 2,
                        "--out", tmp_path / "x.csv"]) == 2

    def test_unreadable_config_rejected(self, tmp_path):
        assert run_cli(["sweep", "--config", tmp_path / "none.json", "--K", 2,
                        "--out", tmp_path / "x.csv"]) == 2
