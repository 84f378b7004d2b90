"""Built-in model corpus and model validation.

Each builtin ships as an ``.hjm`` file next to ``expected.json``, which holds
the hand-derived results the pipeline must reproduce.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from hjq.canonical import TAU, ModelDefinition, build_hjpde_set
from hjq.dsl import ModelSource, parse_model
from hjq.integrability import ClosureReport, constraint_closure
from hjq.symcore import (
    ParseError,
    UnknownIdentifier,
    canonical_form,
    differentiate,
    momentum_name,
    parse_expr,
    same,
    velocity_name,
)

NAMES = ("oscillator2d", "shifted_velocity", "coupled_parameter", "frw", "frw_lambda")


class UnknownModel(KeyError):
    pass


@dataclass(frozen=True)
class BuiltinModel:
    name: str
    source: ModelSource
    model: ModelDefinition
    expected: dict

    @property
    def dsl_text(self) -> str:
        return _data_file(f"{self.name}.hjm")


def _data_file(name: str) -> str:
    return resources.files("hjq.models").joinpath("data", name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def expected_records() -> dict:
    return json.loads(_data_file("expected.json"))


def builtin(name: str) -> BuiltinModel:
    if name not in NAMES:
        raise UnknownModel(f"unknown builtin model {name!r}; known: {', '.join(NAMES)}")
    src = parse_model(_data_file(f"{name}.hjm"))
    return BuiltinModel(name, src, src.build(), expected_records()[name])


# --- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Finding:
    severity: str  # "error" or "warning"
    code: str
    message: str
    symbol: str | None = None

    def __str__(self):
        return f"{self.severity}: {self.message}"


def _source_findings(src: ModelSource) -> list[Finding]:
    out = []
    declared = list(src.coordinates) + list(src.constants)
    derived = [velocity_name(q) for q in src.coordinates] + [momentum_name(q) for q in src.coordinates]
    seen = set()
    for name in declared:
        if name in seen:
            out.append(Finding("error", "name-collision", f"{name} is declared twice", name))
        seen.add(name)
    for name in declared:
        if name in derived or name in (TAU, "p_0"):
            out.append(Finding("error", "name-collision",
                               f"{name} clashes with a generated velocity, momentum or time name", name))
    if not src.coordinates:
        out.append(Finding("error", "no-coordinates", "the model declares no coordinates"))
    return out


def validate_model(m) -> list[Finding]:
    """Findings for a ModelDefinition or an unresolved ModelSource; never raises."""
    findings = []
    if isinstance(m, ModelSource):
        findings = _source_findings(m)
        if any(f.severity == "error" for f in findings):
            return findings
        try:
            m = m.build()
        except UnknownIdentifier as err:
            if err.name == TAU:
                findings.append(Finding("error", "explicit-time",
                                        "the Lagrangian depends on tau explicitly; only autonomous models are supported",
                                        TAU))
            else:
                findings.append(Finding("error", "unresolved-symbol",
                                        f"undeclared symbol {err.name} in the Lagrangian", err.name))
            return findings
        except ParseError as err:
            findings.append(Finding("error", "parse", f"Lagrangian does not parse: {err}"))
            return findings
    lag = m.lagrangian
    syms = lag.free_symbols()
    if m.tau in syms:
        findings.append(Finding("error", "explicit-time", "the Lagrangian depends on tau explicitly", TAU))
    allowed = set(m.coordinates) | set(m.velocities) | set(m.constants)
    for s in sorted(syms - allowed - {m.tau}, key=lambda s: s.name):
        findings.append(Finding("error", "unresolved-symbol", f"symbol {s.name} is not a coordinate, velocity or constant", s.name))
    velocities = set(m.velocities)
    for q in m.coordinates:
        rel = differentiate(lag, m.velocity(q))
        for w in m.velocities:
            second = differentiate(rel, w)
            if second.free_symbols() & velocities:
                findings.append(Finding(
                    "error", "nonlinear-momentum",
                    f"momentum relation for {q.name} is nonlinear in {w.name}; unsupported Lagrangian class",
                    q.name))
                break
    for c in m.constants:
        if c not in syms:
            findings.append(Finding("warning", "unused-constant", f"constant {c.name} does not appear", c.name))
    for q in m.coordinates:
        if q not in syms and m.velocity(q) not in syms:
            findings.append(Finding("warning", "absent-coordinate", f"coordinate {q.name} does not appear", q.name))
    return findings


# --- expectations ------------------------------------------------------------

def _parse_in(model: ModelDefinition, text: str):
    return parse_expr(text, model.table)


def _same_up_to_sign(a, b) -> bool:
    return same(a, b) or same(a, -b)


def compare_with_expected(bm: BuiltinModel, report: ClosureReport | None = None) -> list[str]:
    """Mismatch messages between the pipeline output and the stored record."""
    exp = bm.expected
    model = bm.model
    cs = build_hjpde_set(model)
    report = report or constraint_closure(cs)
    out = []

    def check(field, expected, got):
        if expected != got:
            out.append(f"{bm.name}: {field}: expected {expected}, got {got}")

    check("rank", exp["rank"], cs.hessian.rank)
    check("expressible", exp["expressible"], [q.name for q in cs.expressible_coordinates])
    check("unexpressible", exp["unexpressible"], [q.name for q in cs.unexpressible_coordinates])
    if not same(cs.h0, _parse_in(model, exp["h0"])):
        out.append(f"{bm.name}: h0: expected {exp['h0']}, got {canonical_form(cs.h0)}")
    for q in cs.unexpressible_coordinates:
        want = exp["h_mu"].get(q.name)
        got = cs.h_mu[q]
        if want is None or not same(got, _parse_in(model, want)):
            out.append(f"{bm.name}: H_{q.name}: expected {want}, got {canonical_form(got)}")
    gens = [[c.expression for c in g] for g in report.generations]
    if len(gens) != len(exp["generations"]):
        out.append(f"{bm.name}: generations: expected {len(exp['generations'])}, got {len(gens)}")
    else:
        for k, (want_gen, got_gen) in enumerate(zip(exp["generations"], gens), start=1):
            if len(want_gen) != len(got_gen):
                out.append(f"{bm.name}: generation {k}: expected {len(want_gen)} constraints, got {len(got_gen)}")
                continue
            for want, got in zip(want_gen, got_gen):
                if not _same_up_to_sign(got, _parse_in(model, want)):
                    out.append(f"{bm.name}: generation {k}: expected {want}, got {got}")
    check("parameters", exp["parameters"], [t.name for t in report.independent_parameters])
    check("status", exp["status"], report.status)
    check("fixed", exp["fixed"], [f.parameter.name for f in report.fixings if f.parameter is not None])
    return out


__all__ = [
    "NAMES", "BuiltinModel", "Finding", "UnknownModel", "builtin", "compare_with_expected",
    "expected_records", "validate_model",
]
