"""Numerical integration of the total differential equations.

The generators are compiled once to plain Python functions; the flow is then
stepped with classical RK4 along a piecewise-linear path in parameter space.
Parameter times (``tau`` and the unexpressible coordinates) are set by the
path, never integrated.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from hjq.canonical import CanonicalSystem
from hjq.integrability import INTEGRABLE, ClosureReport, action_one_form, total_differential
from hjq.symcore import Add, Div, Expr, Func, Mul, Num, Pow, Symbol, canonical_form, differentiate, evaluate

INITIAL_TOL = 1e-10
FD_STEP = 1e-5


class FlowError(ValueError):
    pass


class SingularEvaluation(FlowError):
    pass


class InitialDataError(FlowError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class EndpointMismatch(FlowError):
    pass


@dataclass(frozen=True)
class ParameterPath:
    """Piecewise-linear path; each waypoint maps parameter name -> value."""

    waypoints: tuple

    def __post_init__(self):
        pts = tuple(dict(w) for w in self.waypoints)
        if len(pts) < 2:
            raise ValueError("a parameter path needs at least two waypoints")
        keys = set(pts[0])
        for w in pts:
            if set(w) != keys:
                raise ValueError("every waypoint must assign the same parameters")
            if not all(math.isfinite(float(v)) for v in w.values()):
                raise ValueError("waypoints must be finite")
        object.__setattr__(self, "waypoints", pts)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.waypoints[0])

    def length(self) -> float:
        return sum(_dist(a, b) for a, b in zip(self.waypoints, self.waypoints[1:]))


def _dist(a: dict, b: dict) -> float:
    return math.sqrt(sum((float(b[k]) - float(a[k])) ** 2 for k in a))


@dataclass
class FlowResult:
    columns: list  # s, coordinates, momenta, Z, residuals
    rows: list
    state_names: list
    constraint_labels: list
    max_constraint_residual: float
    final_state: dict
    meta: dict = field(default_factory=dict)

    @property
    def samples(self) -> list:
        """(s, phase-space point, Z) per recorded step."""
        n = len(self.state_names)
        return [(r[0], dict(zip(self.state_names, r[1:1 + n])), r[1 + n]) for r in self.rows]

    @property
    def action(self) -> float:
        return self.rows[-1][1 + len(self.state_names)]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([repr(float(x)) for x in r])

    def summary(self) -> dict:
        return {
            **self.meta,
            "steps": len(self.rows) - 1,
            "max_constraint_residual": self.max_constraint_residual,
            "action": self.action,
            "final_state": self.final_state,
        }

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.summary(), indent=2) + "\n")


# --- compilation -------------------------------------------------------------

def _py(e: Expr, names: dict) -> str:
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Symbol):
        return names[e]
    if isinstance(e, Add):
        return "(" + " + ".join(_py(t, names) for t in e.terms) + ")"
    if isinstance(e, Mul):
        return "(" + " * ".join(_py(f, names) for f in e.factors) + ")"
    if isinstance(e, Pow):
        return f"({_py(e.base, names)} ** {e.exp})"
    if isinstance(e, Div):
        return f"({_py(e.num, names)} / {_py(e.den, names)})"
    if isinstance(e, Func):
        return f"math.{e.name}({_py(e.arg, names)})"
    raise TypeError(f"cannot compile {e!r}")


def compile_vector(exprs: list, variables: list, extra: int = 0):
    """Compile expressions to ``f(values) -> tuple``.

    With ``extra`` > 0, ``exprs`` is a list of rows and the function takes a
    weight vector ``w`` of that length, returning ``sum_k row[k] * w[k]``.
    """
    names = {v: f"v{i}" for i, v in enumerate(variables)}
    lines = ["def _f(v, w=()):"]
    if variables:
        lines.append("    " + ", ".join(names[v] for v in variables) + (", = v" if len(variables) == 1 else " = v"))
    if extra:
        lines.append("    " + ", ".join(f"w{k}" for k in range(extra)) + (", = w" if extra == 1 else " = w"))
        parts = []
        for row in exprs:
            terms = [f"{_py(canonical_form(c), names)} * w{k}" for k, c in enumerate(row)
                     if not (isinstance(c, Num) and c.value == 0)]
            parts.append(" + ".join(terms) if terms else "0.0")
    else:
        parts = [_py(canonical_form(e), names) for e in exprs]
    lines.append("    return (" + "".join(p + ", " for p in parts) + ")")
    namespace = {"math": math}
    exec("\n".join(lines), namespace)  # noqa: S102 - source built from our own trees
    return namespace["_f"]


class _Flow:
    def __init__(self, cs: CanonicalSystem, report: ClosureReport):
        self.cs = cs
        model = cs.model
        self.params = list(cs.parameter_times)
        exp_coords = list(cs.expressible_coordinates)
        self.state = exp_coords + [cs.momenta[q] for q in exp_coords]
        self.state += [cs.momenta[q] for q in cs.unexpressible_coordinates]
        self.constants = list(model.constants)
        variables = self.state + self.params + self.constants
        rows = []
        for x in self.state:
            form = total_differential(x, cs)
            rows.append([form.coefficient(t) for t in self.params])
        action = action_one_form(cs).form
        rows.append([action.coefficient(t) for t in self.params])
        self.rhs = compile_vector(rows, variables, extra=len(self.params))
        self.constraints = [
            (cs.label(q), canonical_form(cs.momenta[q] + cs.h_mu[q])) for q in cs.unexpressible_coordinates
        ]
        self.constraints += [(c.label, c.expression) for c in report.constraints]
        self.residual = compile_vector([e for _, e in self.constraints], variables)
        self.variables = variables

    def initial_vector(self, initial: dict, t0: dict):
        values = []
        for s in self.state:
            if s.name in initial:
                values.append(float(initial[s.name]))
            elif s.kind == "momentum" and s.partner in {q.name for q in self.cs.unexpressible_coordinates}:
                values.append(0.0)  # unexpressible momenta default to zero, then get checked
            else:
                raise InitialDataError(f"initial data is missing {s.name}", math.inf)
        consts = []
        for c in self.constants:
            if c.name not in initial:
                raise InitialDataError(f"initial data is missing constant {c.name}", math.inf)
            consts.append(float(initial[c.name]))
        for k in initial:
            if k not in {v.name for v in self.variables}:
                raise InitialDataError(f"unknown name {k!r} in initial data", math.inf)
        params = [float(t0[t.name]) for t in self.params]
        return values, params, consts

    def residuals(self, y, params, consts):
        try:
            return self.residual(tuple(y) + tuple(params) + tuple(consts))
        except (ZeroDivisionError, ValueError, OverflowError) as err:
            raise SingularEvaluation(f"constraint evaluation failed: {err}") from err

    def deriv(self, y, params, consts, direction):
        try:
            return self.rhs(tuple(y) + tuple(params) + tuple(consts), direction)
        except (ZeroDivisionError, ValueError, OverflowError) as err:
            raise SingularEvaluation(f"singular point along the flow: {err}") from err


def integrate_flow(cs: CanonicalSystem, report: ClosureReport, path: ParameterPath,
                   initial: dict, step: float, check_initial: bool = True) -> FlowResult:
    """RK4 in the arclength ``s`` of ``path``; records every step."""
    if not step > 0:
        raise ValueError("step must be positive")
    flow = _Flow(cs, report)
    pnames = [t.name for t in flow.params]
    if set(path.names) != set(pnames):
        raise ValueError(f"path must assign exactly the parameters {pnames}")
    way = [[float(w[n]) for n in pnames] for w in path.waypoints]
    y, params, consts = flow.initial_vector(initial, path.waypoints[0])
    res0 = flow.residuals(y, params, consts)
    worst0 = max((abs(r) for r in res0), default=0.0)
    if check_initial and worst0 > INITIAL_TOL:
        raise InitialDataError(f"initial data is off the constraint surface (residual {worst0:.3g})", worst0)

    model = cs.model
    # output layout: s, tau, coordinates, momenta (model order), Z, residuals
    point_names = [model.tau.name] + [q.name for q in model.coordinates] \
        + [cs.momenta[q].name for q in model.coordinates]
    labels = [lbl for lbl, _ in flow.constraints]
    state_index = {x.name: i for i, x in enumerate(flow.state)}
    param_index = {t.name: i for i, t in enumerate(flow.params)}

    def row(s, y, params, res):
        point = []
        for name in point_names:
            if name in state_index:
                point.append(y[state_index[name]])
            else:
                point.append(params[param_index[name]])
        return [s, *point, y[-1], *(abs(v) for v in res)]

    y = list(y) + [0.0]
    s = 0.0
    rows = [row(s, y, params, res0)]
    worst = worst0
    for a, b in zip(way, way[1:]):
        seg = math.sqrt(sum((bb - aa) ** 2 for aa, bb in zip(a, b)))
        if seg == 0:
            continue
        direction = tuple((bb - aa) / seg for aa, bb in zip(a, b))
        nsteps = max(1, math.ceil(seg / step - 1e-9))
        h = seg / nsteps

        def at(u, a=a, direction=direction):
            return [aa + d * u for aa, d in zip(a, direction)]

        for k in range(nsteps):
            u0 = k * h
            k1 = flow.deriv(y[:-1], at(u0), consts, direction)
            y2 = [yi + 0.5 * h * ki for yi, ki in zip(y, k1)]
            k2 = flow.deriv(y2[:-1], at(u0 + 0.5 * h), consts, direction)
            y3 = [yi + 0.5 * h * ki for yi, ki in zip(y, k2)]
            k3 = flow.deriv(y3[:-1], at(u0 + 0.5 * h), consts, direction)
            y4 = [yi + h * ki for yi, ki in zip(y, k3)]
            k4 = flow.deriv(y4[:-1], at(u0 + h), consts, direction)
            y = [yi + h / 6.0 * (c1 + 2 * c2 + 2 * c3 + c4)
                 for yi, c1, c2, c3, c4 in zip(y, k1, k2, k3, k4)]
            s += h
            # land exactly on the waypoint at the end of a segment
            params = list(b) if k == nsteps - 1 else at(u0 + h)
            res = flow.residuals(y[:-1], params, consts)
            worst = max(worst, max((abs(v) for v in res), default=0.0))
            rows.append(row(s, y, params, res))

    columns = ["s", *point_names, "Z", *(f"residual[{lbl}]" for lbl in labels)]
    final = dict(zip(point_names, rows[-1][1:1 + len(point_names)]))
    meta = {"model": model.name, "step": step, "path": [dict(w) for w in path.waypoints]}
    return FlowResult(columns, rows, point_names, labels, worst, final, meta)


def constraint_drift(result: FlowResult) -> float:
    return result.max_constraint_residual


def action_along_flow(result: FlowResult) -> float:
    return result.action


def path_independence_check(cs: CanonicalSystem, report: ClosureReport, path_a: ParameterPath,
                            path_b: ParameterPath, initial: dict, step: float) -> float:
    """Largest component difference between the two final phase-space points."""
    if report.status != INTEGRABLE:
        raise FlowError(f"closure status is {report.status}; path independence is not expected")
    for end in (0, -1):
        wa, wb = path_a.waypoints[end], path_b.waypoints[end]
        if set(wa) != set(wb) or any(abs(float(wa[k]) - float(wb[k])) > 1e-12 for k in wa):
            raise EndpointMismatch("paths must share their first and last waypoints")
    ra = integrate_flow(cs, report, path_a, initial, step)
    rb = integrate_flow(cs, report, path_b, initial, step)
    return max(abs(ra.final_state[k] - rb.final_state[k]) for k in ra.final_state)


def finite_difference_check(e: Expr, s: Symbol, point: dict) -> float:
    """Relative error of the symbolic derivative against a central difference.

    Falls back to the absolute error when the exact derivative is zero.
    """
    try:
        exact = float(evaluate(differentiate(e, s), point))
        x = float(point[s])
        up = float(evaluate(e, {**point, s: x + FD_STEP}))
        down = float(evaluate(e, {**point, s: x - FD_STEP}))
    except (ZeroDivisionError, ValueError, OverflowError) as err:
        raise SingularEvaluation(f"cannot evaluate near {s.name} = {point.get(s)}: {err}") from err
    approx = (up - down) / (2 * FD_STEP)
    err = abs(approx - exact)
    return err / abs(exact) if exact != 0 else err
