import csv
import json

import pytest

from aoikit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_closed_lcfs_s(capsys):
    code, out, _ = run(capsys, "closed", "--discipline", "lcfs-s", "--mu", "1", "--rho", "0.5,0.5")
    assert code == 0
    data = json.loads(out)
    assert data["per_source_ages"] == [4.0, 4.0]
    assert data["manifest"]["argv"][0] == "closed"


def test_closed_lambda_form(capsys):
    code, out, _ = run(capsys, "closed", "--discipline", "lcfs-s", "--mu", "2", "--lambda", "1,1")
    assert json.loads(out)["per_source_ages"] == [2.0, 2.0]


def test_closed_unstable(capsys):
    code, _, err = run(capsys, "closed", "--discipline", "fcfs", "--mu", "1", "--rho", "0.6,0.6")
    assert code == 1 and "unstable" in err


@pytest.mark.parametrize("argv", [
    ["closed", "--discipline", "fcfs", "--bogus"],
    ["closed", "--discipline", "lifo", "--rho", "0.1"],
    ["closed", "--discipline", "fcfs", "--rho", "0.1", "--lambda", "0.1"],
    [],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_shs_builtin(capsys):
    code, out, _ = run(capsys, "shs", "builtin", "--kind", "lcfs_s_fake", "--lambda1", "0.5",
                       "--lambda2", "0.5", "--mu", "1")
    assert code == 0 and abs(json.loads(out)["age"] - 4.0) < 1e-9


def test_shs_solve_and_transient(capsys, tmp_path):
    from aoikit.shs import build_reference_model
    path = tmp_path / "m.json"
    path.write_text(json.dumps(build_reference_model("lcfs_w", 0.5, 0.5, 1.0).to_dict()))
    code, out, _ = run(capsys, "shs", "solve", "--model", str(path))
    assert code == 0 and json.loads(out)["age"] == pytest.approx(3.9166667, abs=1e-6)
    code, out, _ = run(capsys, "shs", "transient", "--model", str(path), "--t-end", "100",
                       "--dt", "0.01", "--sample-every", "1000")
    assert code == 0 and json.loads(out)["final_age"] == pytest.approx(3.9166667, abs=1e-4)


def test_sim_outputs(capsys, tmp_path):
    rec = tmp_path / "rec.csv"
    out_path = tmp_path / "sim.json"
    argv = ["sim", "--discipline", "lcfs-w", "--rho", "0.3,0.3", "--horizon", "20000",
            "--seed", "7", "--records-csv", str(rec), "--out", str(out_path)]
    assert main(argv) == 0
    first = json.loads(out_path.read_text())
    assert len(first["sources"]) == 2 and "moments" in first["sources"][0]
    rows = list(csv.reader(rec.open()))
    assert rows[0][0] == "source" and len(rows) > 1000
    assert main(argv) == 0
    second = json.loads(out_path.read_text())
    first.pop("manifest"), second.pop("manifest")
    assert first == second


def test_region_contour_csv(capsys):
    code, out, _ = run(capsys, "region", "contour", "--total", "0.612", "--discipline", "fcfs",
                       "--grid-points", "3", "--csv")
    lines = out.strip().splitlines()
    assert lines[0] == "rho1,rho2,age1,age2,discipline" and len(lines) == 4


@pytest.mark.parametrize("argv", [
    ["region", "min-sum", "--discipline", "fcfs", "--n", "2"],
    ["region", "policy-map", "--fractions", "3", "--totals", "3"],
    ["region", "adapt", "--n", "2"],
    ["region", "crossover", "--rho", "0.1,0.1"],
])
def test_region_subcommands(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and json.loads(out)


def test_csv_out_writes_manifest(tmp_path):
    out_path = tmp_path / "c.csv"
    assert main(["closed", "--discipline", "lcfs-w", "--rho", "0.2,0.3", "--csv",
                 "--out", str(out_path)]) == 0
    assert out_path.read_text().startswith("source,rho,age")
    man = json.loads((tmp_path / "c.csv.manifest.json").read_text())
    assert man["config"]["discipline"] == "lcfs-w"


def test_help_lists_flags(capsys):
    with pytest.raises(SystemExit):
        main(["sim", "--help"])
    out = capsys.readouterr().out
    for flag in ("--discipline", "--mu", "--rho", "--lambda", "--horizon", "--seed", "--warmup",
                 "--reps", "--records-csv", "--out", "--csv"):
        assert flag in out


def test_verify_fast_reports_named_checks(capsys):
    code, out, err = run(capsys, "verify", "--level", "fast")
    data = json.loads(out)
    names = {c["name"]: c["passed"] for c in data["checks"]}
    assert names["fault_injection"] and names["shs_closed_form_closure"]
    assert code == (0 if data["passed"] else 1)
    assert sum(c["seconds"] for c in data["checks"]) < 10
