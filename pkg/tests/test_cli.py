import json

import numpy as np
import pytest

from radialmp import presets
from radialmp.cli import main


@pytest.fixture
def ex2_config(tmp_path):
    cfg = presets.example_config(2, 6)
    cfg["grid"]["nodes"] = 600
    path = tmp_path / "ex2.json"
    path.write_text(json.dumps(cfg))
    return path


@pytest.fixture
def ex1_config(tmp_path):
    path = tmp_path / "ex1.json"
    path.write_text(json.dumps(presets.example_config(1, 3)))
    return path


class TestDispatch:
    def test_unknown_subcommand_usage(self, capsys):
        assert main(["frobnicate"]) == 64
        assert "usage" in capsys.readouterr().err

    def test_help(self, capsys):
        assert main([]) == 0
        assert "usage" in capsys.readouterr().out

    def test_malformed_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"N": 6,,}')
        assert main(["check", "--config", str(bad)]) == 2
        err = capsys.readouterr().err
        assert "line" in err and "column" in err

    def test_missing_file(self, tmp_path):
        assert main(["check", "--config", str(tmp_path / "nope.json")]) == 2


class TestCheck:
    def test_example2_passes(self, ex2_config, tmp_path):
        out = tmp_path / "check.json"
        assert main(["check", "--config", str(ex2_config), "--quiet", "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["passed"] and rep["A"]["passed"] and rep["K"]["passed"]
        assert "config_sha256" in rep and "seed" in rep

    def test_violating_A_exits_2(self, tmp_path, capsys):
        cfg = presets.example_config(2, 6)
        cfg["potentials"]["A"] = {"form": "pure_power", "c": 1, "e": -5.0}
        path = tmp_path / "bad_A.json"
        path.write_text(json.dumps(cfg))
        out = tmp_path / "rep.json"
        assert main(["check", "--config", str(path), "--out", str(out)]) == 2
        rep = json.loads(out.read_text())
        assert not rep["A"]["passed"]
        assert any("outside" in m for m in rep["A"]["messages"])


class TestExponents:
    def test_example2_table(self, ex2_config, tmp_path, capsys):
        out = tmp_path / "expo.json"
        assert main(["exponents", "--config", str(ex2_config), "--out", str(out)]) == 0
        printed = capsys.readouterr().out
        assert "I1 ∩ I2: (4, 12)" in printed
        rep = json.loads(out.read_text())["exponents"]
        assert rep["qstar0"]["exact"] == "12"
        assert rep["overlap"]["lo"]["value"] == 4.0

    def test_example1_empty_overlap(self, ex1_config, capsys):
        assert main(["exponents", "--config", str(ex1_config)]) == 0
        printed = capsys.readouterr().out
        assert "I1 ∩ I2: empty" in printed


class TestSolve:
    def test_full_run_and_artifacts(self, ex2_config, tmp_path, capsys):
        csv = tmp_path / "sol.csv"
        rep = tmp_path / "rep.json"
        code = main([
            "solve", "--config", str(ex2_config), "--out", str(csv),
            "--report", str(rep), "--quiet",
        ])
        assert code == 0
        lines = csv.read_text().splitlines()
        assert lines[0] == "r,u"
        assert len(lines) == 601
        report = json.loads(rep.read_text())
        assert report["solve"]["converged"]
        assert report["solve"]["residual"] < 1e-6
        assert report["exponents"]["qstar0"]["exact"] == "12"

    def test_byte_identical_reports(self, ex2_config, tmp_path):
        reps = []
        for name in ("a", "b"):
            csv = tmp_path / "sol.csv"
            rep = tmp_path / f"rep_{name}.json"
            main(["solve", "--config", str(ex2_config), "--out", str(csv),
                  "--report", str(rep), "--quiet"])
            reps.append(rep.read_bytes())
        assert reps[0] == reps[1]

    def test_inadmissible_q_warns_not_errors(self, tmp_path, capsys):
        cfg = presets.example_config(2, 6)
        cfg["grid"]["nodes"] = 400
        cfg["f"] = {"form": "pure_power", "q": 13.0}  # outside I1
        path = tmp_path / "odd_q.json"
        path.write_text(json.dumps(cfg))
        code = main(["solve", "--config", str(path), "--quiet",
                     "--out", str(tmp_path / "s.csv")])
        err = capsys.readouterr().err
        assert "outside its admissible interval" in err
        assert code in (0, 3)  # may or may not converge; must not be rejected


class TestProbe:
    def test_probe_csv(self, ex2_config, tmp_path):
        cfg = json.loads(ex2_config.read_text())
        cfg["probe"]["restarts"] = 4
        ex2_config.write_text(json.dumps(cfg))
        out = tmp_path / "probe.csv"
        code = main([
            "probe", "--config", str(ex2_config), "--end", "zero", "--q", "8",
            "--radii", "1e-3:1e-1:4", "--out", str(out), "--quiet",
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "R,S_estimate,converged"
        assert len(lines) == 5
        S = [float(l.split(",")[1]) for l in lines[1:]]
        assert all(b > a for a, b in zip(S, S[1:]))

    def test_bad_radii(self, ex2_config):
        assert main(["probe", "--config", str(ex2_config), "--end", "zero",
                     "--q", "8", "--radii", "1:2"]) == 2


class TestVerifyEstimates:
    def test_battery_passes(self, ex1_config, tmp_path):
        out = tmp_path / "ve.json"
        code = main(["verify-estimates", "--config", str(ex1_config),
                     "--trials", "25", "--quiet", "--out", str(out)])
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["passed"] and rep["trials"] == 25
        assert rep["failures"] == {"origin": 0, "infinity": 0}


class TestReproduceExamples:
    def test_all_pass_at_n6(self, capsys, tmp_path):
        out = tmp_path / "repr.json"
        assert main(["reproduce-examples", "--N", "6", "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["passed"]
        verdicts = {row["name"]: row["verdict"] for row in rep["rows"]}
        assert verdicts["ex2 I1∩I2"] == "PASS"
        assert all(v == "PASS" for v in verdicts.values())

    def test_n3_skips_inverse_power_examples(self, capsys):
        assert main(["reproduce-examples", "--N", "3", "--quiet"]) == 0

    def test_table_printed(self, capsys):
        main(["reproduce-examples", "--N", "7"])
        out = capsys.readouterr().out
        assert "PASS" in out and "ex2 qstar0" in out
