import hashlib
import json

import pytest

from bifurc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_equilibria_report(capsys):
    code, out, _ = run(capsys, "equilibria", "--m", "2", "--n", "1/3", "--eps", "5/4", "--k", "1/4")
    assert code == 0
    rep = json.loads(out)
    assert rep["case"]["label"] == "2d"
    assert rep["case"]["hopf_points"][0]["exact"] == "(4035 - 17*sqrt(105))/19044"
    assert rep["manifest"]["command"][0] == "equilibria"


def test_hopf_locus_exact(capsys):
    code, out, _ = run(capsys, "hopf", "locus", "--m", "2", "--n", "5/11")
    assert code == 0
    c = json.loads(out)["codim2"]
    assert c["R_minus"]["exact"] == "1727/1280"
    assert c["kH"]["exact"] == "1280/5929"
    assert c["eps_star"]["exact"] == "320/99"


def test_melnikov_joint_zero(capsys):
    code, out, _ = run(capsys, "melnikov", "--joint=-1/100")
    assert code == 0
    jz = json.loads(out)["joint_zero"]
    assert jz["beta3"]["exact"] == "-3/220"
    assert jz["beta2_over_sqrt_minus_beta1"]["exact"] == "1/275"


def test_scan_empty_grid_gives_header(capsys):
    code, out, _ = run(capsys, "scan", "--m", "2", "--n", "1/3", "--eps", "5/4", "--k-min", "0.1",
                       "--k-max", "0.3", "--N", "0", "--format", "csv")
    assert code == 0
    assert out.strip().splitlines() == ["k,k_exact,branch,X2,Y2,trace,det,stability,mark"]


def test_scan_marks_thresholds(capsys):
    code, out, _ = run(capsys, "scan", "--m", "2", "--n", "1/3", "--eps", "5/4", "--k-min", "0.19",
                       "--k-max", "0.24", "--N", "20", "--format", "csv")
    assert code == 0
    marks = {line.split(",")[-1] for line in out.strip().splitlines()[1:]}
    assert {"kSN", "kH1", "kH2", "kT"} <= marks


@pytest.mark.parametrize("argv", [
    ("bt", "--m", "2", "--n", "3/2"),
    ("equilibria", "--m", "2", "--n", "1/3", "--eps", "5/4", "--k", "1/4", "--tol", "1"),
    ("equilibria", "--m", "two", "--n", "1/3", "--eps", "5/4", "--k", "1/4"),
])
def test_bad_input_exit_code(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("m = 2\nn = 5/11\n# comment\n")
    code, out, _ = run(capsys, "bt", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["bt_point"]["n"]["exact"] == "5/11"


def test_report_reingestion(tmp_path, capsys):
    code, out, _ = run(capsys, "equilibria", "--m", "2", "--n", "1/3", "--eps", "5/4", "--k", "1/4")
    rep = tmp_path / "report.json"
    rep.write_text(out)
    code2, out2, _ = run(capsys, "equilibria", "--config", str(rep))
    assert code == code2 == 0
    assert json.loads(out2)["case"] == json.loads(out)["case"]


def test_reproduce_figure_writes_manifest(tmp_path, capsys):
    code, _, _ = run(capsys, "reproduce-figure", "9", "--out", str(tmp_path))
    assert code == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    names = {o["name"] for o in manifest["outputs"]}
    assert {"report.json", "sphere_atlas.csv", "plot_fig9.py"} <= names
    for o in manifest["outputs"]:
        data = (tmp_path / o["name"]).read_bytes()
        assert hashlib.sha256(data).hexdigest() == o["sha256"]


def test_verify_nf_reports_failure(capsys):
    code, out, _ = run(capsys, "verify-nf", "--m", "2")
    rep = json.loads(out)
    assert code == 1
    assert all(r["passed"] for r in rep["codim2"])
    assert rep["snf_grid"]["passed"]
    assert not rep["codim3"]["passed_residuals"]
