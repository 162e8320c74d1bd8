import json

import pytest

from sbfe.cli import main


@pytest.fixture()
def coin_file(tmp_path):
    path = tmp_path / "coin.json"
    path.write_text(json.dumps({"k": 1, "p": [0.5, 0.5]}))
    return str(path)


@pytest.fixture()
def six_file(tmp_path):
    path = tmp_path / "six.json"
    path.write_text(
        json.dumps({"k": 3, "p": [0.15, 0.3, 0.45, 0.55, 0.7, 0.85]})
    )
    return str(path)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEval:
    def test_coin_expected(self, capsys, coin_file):
        code, out, _ = run(capsys, ["eval", "--instance", coin_file, "--policy", "1,2"])
        assert code == 0
        report = json.loads(out)
        assert report["schema_version"] == 1
        assert report["result"]["expected"] == pytest.approx(1.5)
        assert report["result"]["tail"] == pytest.approx([1.0, 1.0, 0.5])
        assert report["config"]["command"] == "eval"

    def test_original_indices_are_respected(self, capsys, tmp_path):
        # file order (0.9, 0.1): testing file-variable 1 first decides with
        # probability 0.9, so the expected cost is 1.1
        path = tmp_path / "unsorted.json"
        path.write_text(json.dumps({"k": 1, "p": [0.9, 0.1]}))
        code, out, _ = run(capsys, ["eval", "--instance", str(path), "--policy", "1,2"])
        assert code == 0
        assert json.loads(out)["result"]["expected"] == pytest.approx(1.1)
        code, out, _ = run(capsys, ["eval", "--instance", str(path), "--policy", "2,1"])
        assert json.loads(out)["result"]["expected"] == pytest.approx(1.9)

    def test_simulation_fields(self, capsys, coin_file):
        code, out, _ = run(
            capsys,
            ["eval", "--instance", coin_file, "--policy", "1,2", "--trials", "2000", "--seed", "5"],
        )
        report = json.loads(out)
        mean = report["result"]["simulated_mean"]
        half = report["result"]["simulated_half_width_95"]
        assert abs(mean - 1.5) <= 4 * half

    def test_byte_identical_reports(self, capsys, coin_file):
        argv = ["eval", "--instance", coin_file, "--policy", "2,1", "--trials", "500", "--seed", "9"]
        _, first, _ = run(capsys, argv)
        _, second, _ = run(capsys, argv)
        assert first == second

    def test_bad_policy_index_fails_validation(self, capsys, coin_file):
        code, _, err = run(capsys, ["eval", "--instance", coin_file, "--policy", "1,3"])
        assert code == 2
        assert "does not name" in err

    def test_unreadable_file(self, capsys, tmp_path):
        code, _, err = run(
            capsys, ["eval", "--instance", str(tmp_path / "nope.json"), "--policy", "1"]
        )
        assert code == 2
        assert err.startswith("error:")

    def test_invalid_json(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        code, _, err = run(capsys, ["eval", "--instance", str(path), "--policy", "1"])
        assert code == 2


class TestOptimizers:
    def test_brute_and_ptas_agree_within_slack(self, capsys, six_file):
        code, out, _ = run(capsys, ["opt-na", "--instance", six_file, "--method", "brute"])
        assert code == 0
        brute = json.loads(out)["result"]["expected"]
        code, out, _ = run(
            capsys, ["opt-na", "--instance", six_file, "--method", "ptas", "--eps", "0.5"]
        )
        assert code == 0
        report = json.loads(out)
        assert report["config"]["eps_int"] == "1/112"
        assert report["result"]["expected"] <= 1.5 * brute + 1e-9

    def test_guided_against_extreme_reference(self, capsys, six_file):
        code, out, _ = run(
            capsys,
            [
                "opt-na", "--instance", six_file, "--method", "ptas-guided",
                "--eps-int", "1/2", "--reference", "extreme",
            ],
        )
        assert code == 0
        report = json.loads(out)
        assert report["result"]["all_certified"] is True
        assert len(report["result"]["policy"]) == 6

    def test_budget_exhaustion_exit_code(self, capsys, six_file):
        code, _, err = run(
            capsys,
            ["opt-na", "--instance", six_file, "--method", "ptas", "--eps", "1.0", "--budget", "3"],
        )
        assert code == 3
        assert "budget" in err

    def test_budget_env_override(self, capsys, six_file, monkeypatch):
        monkeypatch.setenv("SBFE_BUDGET", "3")
        code, _, _ = run(
            capsys, ["opt-na", "--instance", six_file, "--method", "ptas", "--eps", "1.0"]
        )
        assert code == 3

    def test_adaptive_methods_agree(self, capsys, six_file):
        code, out, _ = run(
            capsys, ["opt-adaptive", "--instance", six_file, "--method", "ratio"]
        )
        ratio = json.loads(out)["result"]["expected"]
        code, out, _ = run(
            capsys, ["opt-adaptive", "--instance", six_file, "--method", "dp"]
        )
        dp = json.loads(out)["result"]["expected"]
        assert ratio == pytest.approx(dp, abs=1e-10)

    def test_brute_cap_violation(self, capsys, tmp_path):
        path = tmp_path / "nine.json"
        path.write_text(json.dumps({"k": 2, "p": [0.5] * 9}))
        code, _, err = run(capsys, ["opt-na", "--instance", str(path), "--method", "brute"])
        assert code == 2
        assert "cap" in err


class TestGapCommand:
    def test_csv_on_stdout(self, capsys):
        code, out, _ = run(capsys, ["gap", "--t-list", "1", "--m", "50", "--eps", "0.001"])
        assert code == 0
        lines = out.splitlines()
        comments = [l for l in lines if l.startswith("#")]
        assert any("schema_version=1" in l for l in comments)
        assert any("config=" in l for l in comments)
        header = [l for l in lines if not l.startswith("#")][0]
        assert header == "t,m,eps,e_adaptive,e_nonadaptive,ratio,limit"
        row = [l for l in lines if not l.startswith("#")][1].split(",")
        assert float(row[6]) == pytest.approx(1.5)

    def test_file_output_and_figure(self, capsys, tmp_path):
        csv_path = tmp_path / "gap.csv"
        png_path = tmp_path / "gap.png"
        code, out, _ = run(
            capsys,
            [
                "gap", "--t-list", "1", "2", "--m", "40", "--eps", "0.01",
                "--output", str(csv_path), "--plot", str(png_path),
            ],
        )
        assert code == 0 and out == ""
        assert csv_path.exists()
        assert png_path.exists() and png_path.stat().st_size > 1000


class TestCertifyCommand:
    def test_certify_report_and_figure(self, capsys, tmp_path):
        import random

        rng = random.Random(3)
        path = tmp_path / "big.json"
        path.write_text(
            json.dumps({"k": 40, "p": sorted(rng.uniform(0.02, 0.98) for _ in range(120))})
        )
        png = tmp_path / "tails.png"
        code, out, _ = run(
            capsys,
            [
                "certify", "--instance", str(path), "--a", "30", "--a-prime", "60",
                "--eps-int", "1/2", "--reference", "extreme", "--plot", str(png),
            ],
        )
        assert code == 0
        report = json.loads(out)
        assert report["result"]["passed"] is True
        assert report["result"]["case"] in ("2a", "2b")
        assert len(report["result"]["pairs"]) == 31
        assert png.exists() and png.stat().st_size > 1000

    def test_window_validation(self, capsys, tmp_path):
        path = tmp_path / "small.json"
        path.write_text(json.dumps({"k": 2, "p": [0.2, 0.4, 0.6, 0.8]}))
        code, _, err = run(
            capsys,
            [
                "certify", "--instance", str(path), "--a", "1", "--a-prime", "3",
                "--eps-int", "1/2", "--reference", "extreme",
            ],
        )
        assert code == 2


class TestDominateCommand:
    def test_true_and_false(self, capsys):
        code, out, _ = run(
            capsys, ["dominate", "--v", "1,2,3,7,8,9", "--vstar", "4,5,6", "--n", "9"]
        )
        assert code == 0
        assert json.loads(out)["result"]["dominates"] is True
        code, out, _ = run(capsys, ["dominate", "--v", "3", "--vstar", "1", "--n", "3"])
        assert json.loads(out)["result"]["dominates"] is False

    def test_validation(self, capsys):
        code, _, err = run(capsys, ["dominate", "--v", "4", "--vstar", "1", "--n", "3"])
        assert code == 2
