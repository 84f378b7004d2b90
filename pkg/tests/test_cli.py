import json
import subprocess
import sys

import jsonschema
import pytest

from hjq import __version__
from hjq.cli import main, parse_assignments, parse_waypoints, UsageError
from hjq.models import NAMES, builtin, expected_records
from hjq.report import schema


@pytest.fixture()
def corpus_dir(tmp_path):
    for name in NAMES:
        (tmp_path / f"{name}.hjm").write_text(builtin(name).dsl_text)
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_frw(corpus_dir, capsys):
    code, out, _ = run(capsys, "analyze", corpus_dir / "frw.hjm")
    assert code == 0
    assert "parameters: tau, N" in out
    assert "integrate over: (a, p_a)" in out


def test_analyze_exit_codes(corpus_dir, capsys):
    assert run(capsys, "analyze", corpus_dir / "coupled_parameter.hjm")[0] == 2
    code, _, err = run(capsys, "analyze", corpus_dir / "missing.hjm")
    assert code == 1 and "missing.hjm" in err
    bad = corpus_dir / "bad.hjm"
    bad.write_text('model bad { coords: x; lagrangian: "dx^2 + z"; }')
    code, out, err = run(capsys, "analyze", bad)
    assert code == 1 and "z" in err and out == ""
    broken = corpus_dir / "broken.hjm"
    broken.write_text("model broken { coords: x }")
    assert run(capsys, "analyze", broken)[0] == 1


@pytest.mark.parametrize("name", NAMES)
def test_json_reports_validate_and_are_deterministic(corpus_dir, capsys, name):
    _, first, _ = run(capsys, "analyze", corpus_dir / f"{name}.hjm", "--format", "json")
    _, second, _ = run(capsys, "analyze", corpus_dir / f"{name}.hjm", "--format", "json")
    assert first == second
    doc = json.loads(first)
    jsonschema.validate(doc, schema())
    assert doc["tool"]["version"] == __version__
    assert doc["closure"]["parameters"] == expected_records()[name]["parameters"]


def test_json_report_content_for_frw_lambda(corpus_dir, capsys):
    _, out, _ = run(capsys, "analyze", corpus_dir / "frw_lambda.hjm", "--format", "json")
    doc = json.loads(out)
    assert doc["generators"] == {"H'_0": "(12*N*a^4*Lambda - N*p_a^2 + 12*a*p_0)/(12*a)", "H'_N": "p_N"}
    assert doc["path_integral"]["integration_variables"] == [["a", "p_a"]]
    assert "(-g)^(5/2)" in doc["measure"]["faddeev_popov"]["formula"]
    import hashlib
    assert doc["input_sha256"] == hashlib.sha256((corpus_dir / "frw_lambda.hjm").read_bytes()).hexdigest()


def test_text_reports_are_deterministic(corpus_dir, capsys):
    a = run(capsys, "analyze", corpus_dir / "coupled_parameter.hjm")[1]
    b = run(capsys, "analyze", corpus_dir / "coupled_parameter.hjm")[1]
    assert a == b and "dy forced by [C1.1 = p_x, H'_y] = 1" in a


def test_flow_oscillator_period(corpus_dir, capsys, tmp_path):
    stem = tmp_path / "osc"
    code, out, _ = run(capsys, "flow", corpus_dir / "oscillator2d.hjm", "--path", "tau=0 ; tau=6.283185307179586",
                       "--initial", "x=1,p_x=0,y=0,p_y=0", "--step", "1e-3", "--out", stem)
    assert code == 0
    summary = json.loads((tmp_path / "osc.json").read_text())
    assert abs(summary["final_state"]["x"] - 1) < 1e-6
    assert (tmp_path / "osc.csv").read_text().startswith("s,tau,x,y,p_x,p_y,Z\n")


def test_flow_frw(corpus_dir, capsys, tmp_path):
    code, out, _ = run(capsys, "flow", corpus_dir / "frw.hjm", "--path", "tau=0,N=1 ; tau=1,N=1",
                       "--initial", "a=1,p_a=0", "--out", tmp_path / "frw")
    assert code == 0
    assert json.loads((tmp_path / "frw.json").read_text())["action"] == 0
    code, _, err = run(capsys, "flow", corpus_dir / "frw.hjm", "--path", "tau=0,N=1 ; tau=1,N=1",
                       "--initial", "a=1,p_a=0.1", "--out", tmp_path / "bad")
    assert code == 1 and "residual" in err
    assert not (tmp_path / "bad.csv").exists()


def test_flow_tolerance_flag(corpus_dir, capsys, tmp_path):
    args = ["flow", corpus_dir / "frw_lambda.hjm", "--path", "tau=0,N=1 ; tau=1,N=1",
            "--initial", "a=1,p_a=2.449489742783178,Lambda=0.5", "--step", "0.1", "--out", tmp_path / "f"]
    assert run(capsys, *args)[0] == 0
    assert run(capsys, *args, "--tol", "1e-30")[0] == 1


def test_flow_refuses_parameter_fixing(corpus_dir, capsys):
    code, _, err = run(capsys, "flow", corpus_dir / "coupled_parameter.hjm", "--path", "tau=0 ; tau=1",
                       "--initial", "x=0,p_x=0")
    assert code == 2 and "parameter-fixing" in err


def test_corpus_command(tmp_path, capsys):
    code, out, _ = run(capsys, "corpus")
    assert code == 0 and "frw_lambda" in out
    records = expected_records()
    tampered = json.loads(json.dumps(records))
    tampered["frw"]["generations"] = [["p_a^3"]]
    f = tmp_path / "expected.json"
    f.write_text(json.dumps(tampered))
    code, out, _ = run(capsys, "corpus", "--expected", f)
    assert code == 1
    assert "expected p_a^3, got p_a^2/(12*a)" in out


def test_version_and_export(capsys, tmp_path):
    code, out, _ = run(capsys, "version")
    assert code == 0 and out.strip() == f"hjq {__version__}"
    assert run(capsys, "export", tmp_path / "m")[0] == 0
    assert sorted(p.stem for p in (tmp_path / "m").iterdir()) == sorted(NAMES)


def test_argument_parsers():
    assert parse_assignments("a=1, p_a = -0.5") == {"a": 1.0, "p_a": -0.5}
    p = parse_waypoints("tau=0,N=1 ; tau=1,N=1")
    assert p.waypoints == ({"tau": 0.0, "N": 1.0}, {"tau": 1.0, "N": 1.0})
    for bad in ("a", "a=x", "a=1,a=2", "=3"):
        with pytest.raises(UsageError):
            parse_assignments(bad)
    with pytest.raises(UsageError):
        parse_waypoints("tau=0")


def test_console_script_entry_point(corpus_dir):
    proc = subprocess.run([sys.executable, "-m", "hjq.cli", "analyze", str(corpus_dir / "coupled_parameter.hjm")],
                          capture_output=True, text=True)
    assert proc.returncode == 2
