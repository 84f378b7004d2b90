import csv
import json
import math

import pytest

from _support import pipeline
from hjq.canonical import make_model
from hjq.numflow import (
    EndpointMismatch,
    FlowError,
    InitialDataError,
    ParameterPath,
    SingularEvaluation,
    action_along_flow,
    constraint_drift,
    finite_difference_check,
    integrate_flow,
    path_independence_check,
)
from hjq.symcore import parse_expr

TWO_PI = 2 * math.pi


def path(*points):
    return ParameterPath(tuple(points))


def frw_on_surface(a0, lam, sign=1.0):
    return {"a": a0, "p_a": sign * math.sqrt(12 * lam) * a0 ** 2, "Lambda": lam}


def test_parameter_path_validation():
    with pytest.raises(ValueError):
        path({"tau": 0})
    with pytest.raises(ValueError):
        path({"tau": 0}, {"tau": math.inf})
    with pytest.raises(ValueError):
        path({"tau": 0, "N": 1}, {"tau": 1})
    assert path({"tau": 0, "N": 0}, {"tau": 3, "N": 4}).length() == 5


def test_oscillator_closed_orbit():
    cs, r = pipeline("oscillator2d")
    start = {"x": 1, "p_x": 0, "y": 0, "p_y": 0}
    res = integrate_flow(cs, r, path({"tau": 0}, {"tau": TWO_PI}), start, 1e-4)
    assert all(abs(res.final_state[k] - v) < 1e-6 for k, v in start.items())
    assert res.final_state["tau"] == TWO_PI
    assert constraint_drift(res) == 0


def test_frw_static_flow():
    cs, r = pipeline("frw")
    p = path({"tau": 0, "N": 1}, {"tau": 0.5, "N": 2}, {"tau": 1, "N": 0.5})
    res = integrate_flow(cs, r, p, {"a": 1.3, "p_a": 0}, 1e-2)
    assert all(row[3] == 1.3 for row in res.rows)  # column order: s, tau, N, a
    assert res.columns[:4] == ["s", "tau", "N", "a"]
    assert action_along_flow(res) == 0


def test_shifted_velocity_keeps_p_x_zero():
    cs, r = pipeline("shifted_velocity")
    res = integrate_flow(cs, r, path({"tau": 0, "y": 0}, {"tau": 0, "y": 1}), {"x": 0, "p_x": 0, "p_y": 0}, 1e-3)
    assert max(abs(s[1]["p_x"]) for s in res.samples) < 1e-6


def test_frw_lambda_drift_is_small():
    cs, r = pipeline("frw_lambda")
    p = path({"tau": 0, "N": 1}, {"tau": 0.6, "N": 1.8})
    res = integrate_flow(cs, r, p, frw_on_surface(1.0, 0.5), 1e-3)
    assert constraint_drift(res) < 1e-6
    assert res.constraint_labels == ["H'_N", "C1.1"]


def test_off_surface_data_is_reported_not_masked():
    cs, r = pipeline("frw")
    bad = {"a": 0.01, "p_a": 0.1}
    with pytest.raises(InitialDataError) as info:
        integrate_flow(cs, r, path({"tau": 0, "N": 1}, {"tau": 1e-3, "N": 1}), bad, 1e-4)
    assert info.value.residual >= 0.05
    res = integrate_flow(cs, r, path({"tau": 0, "N": 1}, {"tau": 1e-3, "N": 1}), bad, 1e-4, check_initial=False)
    assert constraint_drift(res) >= 0.05


def test_missing_and_unknown_initial_names():
    cs, r = pipeline("oscillator2d")
    with pytest.raises(InitialDataError):
        integrate_flow(cs, r, path({"tau": 0}, {"tau": 1}), {"x": 1, "p_x": 0, "y": 0}, 0.1)
    with pytest.raises(InitialDataError):
        integrate_flow(cs, r, path({"tau": 0}, {"tau": 1}), {"x": 1, "p_x": 0, "y": 0, "p_y": 0, "q": 1}, 0.1)
    cs, r = pipeline("frw_lambda")
    with pytest.raises(InitialDataError):
        integrate_flow(cs, r, path({"tau": 0, "N": 1}, {"tau": 1, "N": 1}), {"a": 1, "p_a": 0}, 0.1)


def test_wrong_path_parameters_and_step():
    cs, r = pipeline("frw")
    with pytest.raises(ValueError):
        integrate_flow(cs, r, path({"tau": 0}, {"tau": 1}), {"a": 1, "p_a": 0}, 0.1)
    with pytest.raises(ValueError):
        integrate_flow(cs, r, path({"tau": 0, "N": 1}, {"tau": 1, "N": 1}), {"a": 1, "p_a": 0}, 0)


def test_singular_point_is_an_error():
    cs, r = pipeline("frw")
    with pytest.raises(SingularEvaluation):
        integrate_flow(cs, r, path({"tau": 0, "N": 1}, {"tau": 1, "N": 1}), {"a": 0, "p_a": 0}, 0.1)


def test_zero_length_path():
    cs, r = pipeline("oscillator2d")
    res = integrate_flow(cs, r, path({"tau": 1}, {"tau": 1}), {"x": 1, "p_x": 0, "y": 0, "p_y": 0}, 0.1)
    assert action_along_flow(res) == 0 and len(res.rows) == 1


def test_samples_are_ordered():
    cs, r = pipeline("oscillator2d")
    res = integrate_flow(cs, r, path({"tau": 0}, {"tau": 0.35}), {"x": 1, "p_x": 0, "y": 0, "p_y": 0}, 0.1)
    s = [row[0] for row in res.samples]
    assert s == sorted(s) and len(s) == 5
    assert s[-1] == pytest.approx(0.35)


def test_rk4_order_on_halving():
    cs, r = pipeline("oscillator2d")
    start = {"x": 1, "p_x": 0, "y": 0, "p_y": 0}

    def err(h):
        f = integrate_flow(cs, r, path({"tau": 0}, {"tau": TWO_PI}), start, h).final_state
        return max(abs(f[k] - v) for k, v in start.items())

    assert 12 <= err(1e-2) / err(5e-3) <= 20


def test_action_matches_lagrangian_quadrature():
    cs, r = pipeline("oscillator2d")
    x0, y0, py0, T = 1.0, 0.5, 0.3, 1.7
    res = integrate_flow(cs, r, path({"tau": 0}, {"tau": T}), {"x": x0, "p_x": 0, "y": y0, "p_y": py0}, 1e-3)

    def lag(t):
        x, vx = x0 * math.cos(t), -x0 * math.sin(t)
        y, vy = y0 * math.cos(t) + py0 * math.sin(t), -y0 * math.sin(t) + py0 * math.cos(t)
        return 0.5 * (vx ** 2 + vy ** 2) - 0.5 * (x ** 2 + y ** 2)

    n = 2000
    h = T / n
    simpson = h / 3 * (lag(0) + lag(T) + sum((4 if k % 2 else 2) * lag(k * h) for k in range(1, n)))
    assert abs(action_along_flow(res) - simpson) < 1e-6 * T


def test_path_independence_identical_paths():
    cs, r = pipeline("shifted_velocity")
    p = path({"tau": 0, "y": 0}, {"tau": 0.5, "y": 0.5})
    assert path_independence_check(cs, r, p, p, {"x": 0.2, "p_x": 0, "p_y": 0}, 1e-2) == 0


def test_shifted_velocity_paths_differ_by_gauge_motion():
    # on p_x = 0 the tau flow moves x by y*dtau, so the two orders differ by dy*dtau
    cs, r = pipeline("shifted_velocity")
    a = path({"tau": 0, "y": 0}, {"tau": 0.5, "y": 0}, {"tau": 0.5, "y": 0.5})
    b = path({"tau": 0, "y": 0}, {"tau": 0, "y": 0.5}, {"tau": 0.5, "y": 0.5})
    diff = path_independence_check(cs, r, a, b, {"x": 0.2, "p_x": 0, "p_y": 0}, 1e-3)
    assert diff == pytest.approx(0.25, abs=1e-9)


def test_frw_paths_differ_by_lapse_integral():
    # on the surface a = a0 exp(-sqrt(Lambda/3) * integral of N dtau)
    cs, r = pipeline("frw_lambda")
    lam = 0.5
    a = path({"tau": 0, "N": 1}, {"tau": 0.5, "N": 1}, {"tau": 0.5, "N": 1.5})
    b = path({"tau": 0, "N": 1}, {"tau": 0, "N": 1.5}, {"tau": 0.5, "N": 1.5})
    start = frw_on_surface(1.0, lam)
    ra = integrate_flow(cs, r, a, start, 1e-3)
    rb = integrate_flow(cs, r, b, start, 1e-3)
    k = math.sqrt(lam / 3)
    assert ra.final_state["a"] == pytest.approx(math.exp(-0.5 * k), abs=1e-9)
    assert rb.final_state["a"] == pytest.approx(math.exp(-0.75 * k), abs=1e-9)
    assert path_independence_check(cs, r, a, b, start, 1e-3) > 0.1


def test_path_independence_preconditions():
    cs, r = pipeline("shifted_velocity")
    a = path({"tau": 0, "y": 0}, {"tau": 1, "y": 0})
    b = path({"tau": 0, "y": 0}, {"tau": 1, "y": 1})
    with pytest.raises(EndpointMismatch):
        path_independence_check(cs, r, a, b, {"x": 0, "p_x": 0, "p_y": 0}, 0.1)
    cs, r = pipeline("coupled_parameter")
    with pytest.raises(FlowError):
        path_independence_check(cs, r, a, a, {"x": 0, "p_x": 0}, 0.1)


def test_outputs(tmp_path):
    cs, r = pipeline("frw_lambda")
    res = integrate_flow(cs, r, path({"tau": 0, "N": 1}, {"tau": 0.05, "N": 1}), frw_on_surface(1, 0.25), 1e-2)
    res.write_csv(tmp_path / "f.csv")
    res.write_json(tmp_path / "f.json")
    rows = list(csv.reader(open(tmp_path / "f.csv")))
    assert rows[0] == ["s", "tau", "N", "a", "p_N", "p_a", "Z", "residual[H'_N]", "residual[C1.1]"]
    assert len(rows) == 1 + 6  # header, start, five steps
    summary = json.loads((tmp_path / "f.json").read_text())
    assert summary["model"] == "frw_lambda" and summary["steps"] == 5
    assert set(summary["final_state"]) == {"tau", "N", "a", "p_N", "p_a"}


def test_finite_difference_examples():
    m = make_model("fd", ["N", "a"], ["c"], "-3*a*da^2/N + c")
    t = m.table
    x2 = parse_expr("a^2", t)
    assert finite_difference_check(x2, t["a"], {t["a"]: 3}) < 1e-8
    kin = parse_expr("-3*a*da^2/N", t)
    point = {t["a"]: 1.3, t["da"]: -0.7, t["N"]: 0.9}
    for s in (t["a"], t["da"], t["N"]):
        assert finite_difference_check(kin, s, point) < 1e-6
    assert finite_difference_check(parse_expr("c", t), t["a"], {t["a"]: 1, t["c"]: 2}) == 0
    with pytest.raises(SingularEvaluation):
        finite_difference_check(parse_expr("1/a", t), t["a"], {t["a"]: 0})
