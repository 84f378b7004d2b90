import dataclasses

import pytest

from hjq.dsl import DslError, ModelSource, parse_model, to_dsl
from hjq.models import NAMES, UnknownModel, builtin, compare_with_expected, expected_records, validate_model


def test_corpus_listing():
    assert "frw_lambda" in NAMES
    assert set(expected_records()) == set(NAMES)


@pytest.mark.parametrize("name", NAMES)
def test_builtin_reproduces_expected_record(name):
    assert compare_with_expected(builtin(name)) == []


@pytest.mark.parametrize("name", NAMES)
def test_builtins_validate_cleanly(name):
    assert validate_model(builtin(name).model) == []
    assert validate_model(builtin(name).source) == []


def test_builtin_contents():
    assert builtin("oscillator2d").expected["rank"] == 2
    assert builtin("oscillator2d").expected["generations"] == []
    assert builtin("frw_lambda").expected["generations"] == [["-p_a^2/(12*a) + Lambda*a^3"]]
    assert builtin("coupled_parameter").expected["status"] == "parameter-fixing"
    frw = builtin("frw_lambda").model
    assert [q.name for q in frw.coordinates] == ["N", "a"]
    assert str(frw.lagrangian) == "-3*a*da^2/N - N*Lambda*a^3"


def test_unknown_builtin():
    with pytest.raises(UnknownModel):
        builtin("bianchi_ix")


def test_tampered_record_is_caught():
    bm = builtin("frw_lambda")
    exp = dict(bm.expected, generations=[["p_a^2/(6*a) + Lambda*a^3"]])
    out = compare_with_expected(dataclasses.replace(bm, expected=exp))
    assert len(out) == 1 and "generation 1" in out[0]


def test_expected_constraints_compare_up_to_sign():
    bm = builtin("frw")
    exp = dict(bm.expected, generations=[["p_a^2/(12*a)"]])
    assert compare_with_expected(dataclasses.replace(bm, expected=exp)) == []


def codes(findings):
    return [(f.severity, f.code, f.symbol) for f in findings]


def test_validation_findings():
    rel = ModelSource("rel", ("x",), ("m",), "-m*sqrt(1 - dx^2)")
    assert codes(validate_model(rel)) == [("error", "nonlinear-momentum", "x")]
    undeclared = ModelSource("u", ("x",), (), "1/2*dx^2 + z")
    found = validate_model(undeclared)
    assert codes(found) == [("error", "unresolved-symbol", "z")]
    assert "z" in found[0].message
    timed = ModelSource("t", ("x",), (), "1/2*dx^2 + tau*x")
    assert codes(validate_model(timed)) == [("error", "explicit-time", "tau")]
    clash = ModelSource("c", ("x", "dx"), (), "x")
    assert ("error", "name-collision", "dx") in codes(validate_model(clash))
    dup = ModelSource("c", ("x",), ("x",), "dx^2")
    assert ("error", "name-collision", "x") in codes(validate_model(dup))
    unused = ModelSource("w", ("x", "y"), ("k",), "1/2*dx^2")
    assert codes(validate_model(unused)) == [("warning", "unused-constant", "k"),
                                             ("warning", "absent-coordinate", "y")]
    broken = ModelSource("b", ("x",), (), "dx +")
    assert codes(validate_model(broken)) == [("error", "parse", None)]


# --- dsl ---------------------------------------------------------------------

def test_dsl_round_trip():
    for name in NAMES:
        src = builtin(name).source
        assert parse_model(to_dsl(src)) == src


def test_dsl_accepts_comments_and_spacing():
    text = """
    # leading comment
    model m {   # trailing comment
        coords: x y;    consts: k, w;
        lagrangian: "1/2*dx^2 - k*x # not a comment";
    }
    """
    with pytest.raises(Exception):
        parse_model(text).build()  # '#' inside the string reaches the expression parser
    src = parse_model(text.replace(" # not a comment", ""))
    assert src.coordinates == ("x", "y") and src.constants == ("k", "w")


@pytest.mark.parametrize("text, line", [
    ("modl m { coords: x; lagrangian: \"x\"; }", 1),
    ("model m {\n coords: x;\n lagrangian: \"x\"\n}", 4),
    ("model m {\n coords: x;\n}", 3),
    ("model m {\n coords: x;\n speed: x;\n lagrangian: \"x\"; }", 3),
    ("model m { coords: x; coords: y; lagrangian: \"x\"; }", 1),
    ("model m { coords: x; lagrangian: \"x; }", 1),
    ("model m { coords: x; lagrangian: \"x\"; } extra", 1),
])
def test_dsl_errors_carry_positions(text, line):
    with pytest.raises(DslError) as info:
        parse_model(text)
    assert info.value.line == line
