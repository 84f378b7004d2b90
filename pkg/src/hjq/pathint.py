"""Canonical path-integral data for an integrable system.

The representation integrates over the expressible canonical pairs only; the
unexpressible coordinates ride along as parameters next to ``tau``.  Surface
constraints are listed as side conditions, never inserted as delta factors.
"""

from __future__ import annotations

from dataclasses import dataclass

from hjq.canonical import CanonicalSystem
from hjq.integrability import INTEGRABLE, ClosureReport, OneForm, action_one_form
from hjq.symcore import Expr, Symbol, canonical_form

FLAT_MEASURE = "flat over listed canonical pairs"


class NotIntegrable(ValueError):
    pass


@dataclass(frozen=True)
class PathIntegralSpec:
    integration_variables: tuple[tuple[Symbol, Symbol], ...]
    parameter_variables: tuple[Symbol, ...]
    integrand: OneForm
    measure: str
    side_conditions: tuple[Expr, ...]

    def to_dict(self) -> dict:
        return {
            "integration_variables": [[q.name, p.name] for q, p in self.integration_variables],
            "parameter_variables": [t.name for t in self.parameter_variables],
            "integrand": {t.name: str(c) for t, c in self.integrand.coefficients.items()},
            "measure": self.measure,
            "side_conditions": [str(c) for c in self.side_conditions],
        }


@dataclass(frozen=True)
class MeasureEntry:
    label: str
    formula: str
    note: str

    def to_dict(self) -> dict:
        return {"label": self.label, "formula": self.formula, "note": self.note}


@dataclass(frozen=True)
class MeasureComparison:
    model_name: str
    canonical_entry: MeasureEntry
    faddeev_popov_entry: MeasureEntry
    fradkin_vilkovisky_entry: MeasureEntry

    def to_dict(self) -> dict:
        return {
            "model": self.model_name,
            "canonical": self.canonical_entry.to_dict(),
            "faddeev_popov": self.faddeev_popov_entry.to_dict(),
            "fradkin_vilkovisky": self.fradkin_vilkovisky_entry.to_dict(),
        }


def emit_path_integral(cs: CanonicalSystem, report: ClosureReport) -> PathIntegralSpec:
    if report.status != INTEGRABLE:
        raise NotIntegrable(f"closure status is {report.status}; no path integral is emitted")
    action = action_one_form(cs).form
    params = tuple(report.independent_parameters)
    integrand = OneForm({t: action.coefficient(t) for t in params})
    side = [canonical_form(cs.momenta[q] + cs.h_mu[q]) for q in cs.unexpressible_coordinates]
    side += [c.expression for c in report.constraints]
    return PathIntegralSpec(
        integration_variables=tuple(cs.expressible_pairs()),
        parameter_variables=params,
        integrand=integrand,
        measure=FLAT_MEASURE,
        side_conditions=tuple(side),
    )


def measure_report(model_name: str) -> MeasureComparison:
    """Fixed comparison of the canonical measure with two gauge-fixed ones."""
    return MeasureComparison(
        model_name=model_name,
        canonical_entry=MeasureEntry(
            "canonical (Hamilton-Jacobi)",
            "prod_t prod_a dq_a dp_a",
            "flat measure over the (q_a, p_a) pairs; no delta functions, no gauge fixing, "
            "no determinant factors",
        ),
        faddeev_popov_entry=MeasureEntry(
            "Faddeev-Popov",
            "dM_FP = prod_x (-g)^(5/2) prod_{mu<=nu} dg^{mu nu}",
            "local measure factor (-g)^(5/2); requires gauge fixing",
        ),
        fradkin_vilkovisky_entry=MeasureEntry(
            "Fradkin-Vilkovisky",
            "dM_FV = prod_x (-g)^(7/2)·g^00 prod_{mu<=nu} dg^{mu nu}",
            "local measure factor (-g)^(7/2)·g^00; requires gauge fixing",
        ),
    )
