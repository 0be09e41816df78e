import csv
import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from tsip import cli
from tsip.backlund import rs_function
from tsip.families import instantiate
from tsip.ratfun import RationalFunction


def schema(name):
    return json.loads(resources.files("tsip").joinpath("schemas", name).read_text())


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, schema("families.json"))
    assert len(data["families"]) == 12


def test_spectrum_json(capsys):
    code, out, _ = run(capsys, "spectrum", "--family", "morse", "--param", "A=2", "--param", "B=1",
                       "--param", "alpha=1", "--n", "1")
    assert code == 0
    rows = json.loads(out)["levels"]
    assert [r["n"] for r in rows] == [0, 1]
    assert [r["energy_float"] for r in rows] == [0.0, 3.0]


def test_spectrum_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "--family", "harmonic", "--param", "omega=1/2", "--n", "3",
                       "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["energy_float"]) for r in rows] == [0.0, 0.5, 1.0, 1.5]


def test_spectrum_beyond_bound_is_usage_error(capsys):
    code, _, err = run(capsys, "spectrum", "--family", "morse", "--param", "A=2", "--param", "B=1",
                       "--param", "alpha=1", "--n", "2")
    assert code == 2 and "bound state" in err


def test_rs_integer_lists_and_round_trip(capsys):
    code, out, _ = run(capsys, "rs", "--family", "harmonic", "--param", "omega=2", "--n", "2")
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, schema("level.json"))
    # w_2 = (2y^3 - 5y) / (2y^2 - 1) up to a common sign
    num, den = data["numerator"], data["denominator"]
    s = 1 if den[-1] > 0 else -1
    assert [s * v for v in num] == [0, -5, 0, 2]
    assert [s * v for v in den] == [-1, 0, 2]
    lev = rs_function(instantiate("harmonic", {"omega": 2}), 2)
    assert RationalFunction.from_json(data["w"]) == lev.w


def test_output_is_deterministic(capsys):
    argv = ("rs", "--family", "kepler", "--param", "gamma=3", "--param", "l=1/2", "--n", "4")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    argv = ("wavefunction", "--family", "morse", "--param", "A=7", "--param", "B=1", "--param", "alpha=1",
            "--n", "2", "--points", "50")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


@pytest.mark.parametrize("argv, fragment", [
    (["spectrum", "--family", "harmonic", "--param", "omega=abc", "--n", "1"], "#1"),
    (["spectrum", "--family", "morse", "--param", "A=2", "--param", "B", "--n", "1"], "#2"),
    (["spectrum", "--family", "harmonic", "--param", "omega=1", "--param", "l=2", "--n", "1"], "l"),
    (["rs", "--family", "poschl-teller-2", "--param", "A=1", "--param", "B=2", "--param", "alpha=1", "--n", "0"], ""),
    (["ground"], "--family"),
])
def test_bad_input_exits_2(capsys, argv, fragment):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert err.startswith("error:") and fragment in err


def test_unknown_family_rejected_by_parser(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["rs", "--family", "coulomb", "--n", "1"])
    assert exc.value.code == 2


def test_wavefunction_csv_and_descriptor(tmp_path, capsys):
    target = tmp_path / "psi.csv"
    code, out, _ = run(capsys, "-o", str(target), "wavefunction", "--family", "harmonic", "--param", "omega=2",
                       "--n", "1", "--points", "21", "--x-min", "-1", "--x-max", "1")
    assert code == 0 and out == ""
    rows = list(csv.reader(io.StringIO(target.read_text())))
    assert rows[0] == ["x", "psi"] and len(rows) == 22
    xs = [float(r[0]) for r in rows[1:]]
    assert xs[10] == pytest.approx(0.0, abs=1e-15)
    desc = json.loads((tmp_path / "psi.json").read_text())
    assert desc["n"] == 1 and desc["family"] == "harmonic"


def test_output_dir_default_names(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("TSIP_OUTPUT_DIR", str(tmp_path))
    assert cli.main(["spectrum", "--family", "harmonic", "--param", "omega=1", "--n", "2"]) == 0
    assert cli.main(["rs", "--family", "harmonic", "--param", "omega=1", "--n", "2"]) == 0
    assert cli.main(["classify", "--family", "morse", "--param", "A=2", "--param", "B=1", "--param", "alpha=1"]) == 0
    assert capsys.readouterr().out == ""
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["classify-morse.json", "rs-harmonic-n2.json", "spectrum-harmonic.json"]


def test_ground_from_raw_coefficients(capsys):
    code, out, _ = run(capsys, "ground", "--raw", "--solver", "second", "--lam2", "6", "--mu2", "0",
                       "--lam0", "0", "--alpha", "1", "--branch", "minus")
    assert code == 0
    data = json.loads(out)
    assert data["b1"] == "2/1" and data["b_minus1"] == "-1/1" and data["b0"] == "0/1"
    assert data["exactness"] == "exact-rational"


def test_ground_from_family(capsys):
    code, out, _ = run(capsys, "ground", "--family", "morse", "--param", "A=2", "--param", "B=1",
                       "--param", "alpha=1")
    assert code == 0
    data = json.loads(out)
    assert data["E0"] == "0/1" and data["exactness"] == "exact-rational"


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--family", "poschl-teller-1", "--param", "A=1", "--param", "B=2",
                       "--param", "alpha=1")
    assert code == 0 and json.loads(out)["class"] == "II"


def test_verify_passes(capsys):
    code, out, err = run(capsys, "verify", "--family", "harmonic", "--param", "omega=2", "--n", "3")
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, schema("report.json"))
    assert data["passed"] and err.startswith("PASS harmonic")


def test_verify_failure_exits_1(capsys, monkeypatch):
    real = cli._report

    def tampered(*a, **k):
        rep = real(*a, **k)
        rep.failures.append("injected")
        return rep

    monkeypatch.setattr(cli, "_report", tampered)
    code, out, err = run(capsys, "verify", "--family", "harmonic", "--param", "omega=2", "--n", "1", "--no-oracle")
    assert code == 1
    assert json.loads(out)["passed"] is False
    assert "FAIL" in err and "injected" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "tsip.cli", "list"], capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["families"][0]["name"] == "harmonic"
