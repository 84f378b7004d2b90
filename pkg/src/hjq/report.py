"""Deterministic analysis reports (JSON and plain text)."""

from __future__ import annotations

import hashlib
import json
from importlib import resources

from hjq import __version__
from hjq.canonical import CanonicalSystem
from hjq.integrability import INTEGRABLE, PARAMETER_FIXING, ClosureReport, second_class_probe
from hjq.pathint import emit_path_integral, measure_report
from hjq.symcore import canonical_form, to_string


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _s(e) -> str:
    return to_string(canonical_form(e))


def build_report(cs: CanonicalSystem, closure: ClosureReport, source_text: str,
                 findings=(), flows=()) -> dict:
    model = cs.model
    h = cs.hessian
    doc = {
        "tool": {"name": "hjq", "version": __version__},
        "input_sha256": sha256_text(source_text),
        "model": {
            "name": model.name,
            "coordinates": [q.name for q in model.coordinates],
            "constants": [c.name for c in model.constants],
            "lagrangian": to_string(model.lagrangian),
        },
        "findings": [{"severity": f.severity, "code": f.code, "message": f.message} for f in findings],
        "hessian": {
            "matrix": [[_s(e) for e in row] for row in h.matrix.entries],
            "rank": h.rank,
            "expressible": [q.name for q in cs.expressible_coordinates],
            "unexpressible": [q.name for q in cs.unexpressible_coordinates],
            "pivots": [_s(p) for p in h.pivots],
        },
        "momenta": {q.name: _s(r) for q, r in cs.momentum_relations.items()},
        "h0": _s(cs.h0),
        "generators": {cs.label(t): _s(g) for t, g in cs.generators().items()},
        "closure": {
            "status": closure.status,
            "generations": [
                [{"label": c.label, "expression": _s(c.expression), "origin": list(c.origin)} for c in gen]
                for gen in closure.generations
            ],
            "parameters": [t.name for t in closure.independent_parameters],
            "fixings": [
                {"parameter": f.parameter.name if f.parameter is not None else None,
                 "origin": list(f.origin), "bracket": _s(f.bracket)}
                for f in closure.fixings
            ],
            "probabilistic": closure.probabilistic,
            "probe": second_class_probe(cs, closure) if closure.status == PARAMETER_FIXING else None,
        },
        "path_integral": emit_path_integral(cs, closure).to_dict() if closure.status == INTEGRABLE else None,
        "measure": measure_report(model.name).to_dict(),
    }
    if flows:
        doc["flows"] = [dict(f) for f in flows]
    return doc


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def schema() -> dict:
    text = resources.files("hjq").joinpath("schema", "report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def to_text(doc: dict) -> str:
    m = doc["model"]
    h = doc["hessian"]
    c = doc["closure"]
    lines = [
        f"model {m['name']}",
        f"  coordinates: {', '.join(m['coordinates'])}",
        f"  constants:   {', '.join(m['constants']) or '-'}",
        f"  L = {m['lagrangian']}",
    ]
    for f in doc["findings"]:
        lines.append(f"  {f['severity']}: {f['message']}")
    lines += [
        "",
        f"hessian rank {h['rank']}",
        f"  expressible:   {', '.join(h['expressible']) or '-'}",
        f"  unexpressible: {', '.join(h['unexpressible']) or '-'}",
        "",
        f"H_0 = {doc['h0']}",
    ]
    for label, g in doc["generators"].items():
        lines.append(f"{label} = {g}")
    lines += ["", f"closure: {c['status']}"]
    for k, gen in enumerate(c["generations"], start=1):
        lines.append(f"  generation {k}:")
        for rec in gen:
            lines.append(f"    {rec['label']} = {rec['expression']}   from [{', '.join(rec['origin'])}]")
    lines.append(f"  parameters: {', '.join(c['parameters'])}")
    if c["probe"]:
        lines += ["  " + ln for ln in c["probe"].splitlines()]
    if c["probabilistic"]:
        lines.append("  note: some zero tests relied on numeric probing")
    pi = doc["path_integral"]
    if pi is not None:
        pairs = ", ".join(f"({q}, {p})" for q, p in pi["integration_variables"])
        lines += [
            "",
            "path integral",
            f"  integrate over: {pairs or '-'}",
            f"  parameters:     {', '.join(pi['parameter_variables'])}",
            f"  measure:        {pi['measure']}",
        ]
        for t, coeff in pi["integrand"].items():
            lines.append(f"  dZ/d{t} = {coeff}")
        for sc in pi["side_conditions"]:
            lines.append(f"  on surface: {sc} = 0")
    meas = doc["measure"]
    lines += ["", "measure comparison"]
    for key in ("canonical", "faddeev_popov", "fradkin_vilkovisky"):
        e = meas[key]
        lines.append(f"  {e['label']}: {e['formula']}")
        lines.append(f"    {e['note']}")
    lines.append("")
    lines.append(f"hjq {doc['tool']['version']}  input sha256 {doc['input_sha256']}")
    return "\n".join(lines) + "\n"
