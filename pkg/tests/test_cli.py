import json

import pytest

from invariant_volumes.cli import run


def _report(tmp_path, *argv, name="out.json"):
    path = tmp_path / name
    code = run([*argv, "--output", str(path)])
    return code, path


def test_curvature_goldens(tmp_path):
    code, path = _report(tmp_path, "curvature", "--domain", "ball:r=2", "--dim", "3", "--point", "0,0,0")
    assert code == 0
    rep = json.loads(path.read_text())
    table = {row["quantity"]: row["value"] for row in rep["tables"]["curvature"]}
    assert table["scalar"] == pytest.approx(-12.0, rel=1e-5)
    assert table["hsc_e1"] == pytest.approx(-2.0, rel=1e-5)
    assert table["metric[1,1]"] == pytest.approx(0.25, rel=1e-6)
    assert rep["records"] and all(r["pass"] for r in rep["records"])
    assert {"version", "seed", "convention"} <= set(rep["meta"])


def test_quotient_pass_and_fail(tmp_path):
    code, path = _report(tmp_path, "quotient", "--genus", "2")
    assert code == 0
    (rec,) = json.loads(path.read_text())["records"]
    assert rec["pass"] is True and abs(rec["margin"]) <= 1e-3
    assert {"id", "anchor", "lhs", "rhs", "margin", "pass", "kind"} <= set(rec)
    code, _ = _report(tmp_path, "quotient", "--density-scale", "2", name="bad.json")
    assert code == 1


def test_verify_is_deterministic(tmp_path):
    args = ["verify", "--suite", "all", "--domain", "polydisk:r=1,1", "--dim", "2", "--seed", "7",
            "--samples", "1", "--grid", "50"]
    _, a = _report(tmp_path, *args, name="a.json")
    _, b = _report(tmp_path, *args, name="b.json")
    assert a.read_bytes() == b.read_bytes()
    ids = [r["id"] for r in json.loads(a.read_text())["records"]]
    assert ids == sorted(ids)


def test_csv_tables(tmp_path):
    code, path = _report(tmp_path, "squeeze", "--domain", "polydisk:r=1,1", "--dim", "2", "--format", "csv")
    assert code == 0
    text = path.read_text()
    assert "# squeezing" in text and "1.4142135623730951" in text


@pytest.mark.parametrize("cmd", ["bergman", "volumes", "metrics"])
def test_value_subcommands(tmp_path, cmd):
    code, path = _report(tmp_path, cmd, "--domain", "ball:r=1", "--dim", "1", "--point", "0.2")
    assert code == 0
    assert json.loads(path.read_text())["tables"]


def test_stdout_report(capsys):
    assert run(["squeeze", "--domain", "ball:r=1"]) == 0
    assert json.loads(capsys.readouterr().out)["tables"]["squeezing"]


@pytest.mark.parametrize("argv", [
    ["volumes", "--domain", "nope"],
    ["volumes", "--point", "abc"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        run(argv)
    assert exc.value.code == 2
