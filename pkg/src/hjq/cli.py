"""Command-line entry point ``hjq``.

Exit codes for ``analyze``: 0 integrable, 2 parameter-fixing, 3 closure budget
exhausted, 1 on any error.  ``flow`` exits 0 only when the worst constraint
residual stays below ``--tol``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from hjq import __version__
from hjq.canonical import AnalysisError, build_hjpde_set
from hjq.dsl import DslError, ModelSource, parse_model
from hjq.integrability import BUDGET_EXCEEDED, INTEGRABLE, PARAMETER_FIXING, constraint_closure
from hjq.models import NAMES, builtin, compare_with_expected, validate_model
from hjq.numflow import FlowError, InitialDataError, ParameterPath, integrate_flow
from hjq.report import build_report, to_json, to_text
from hjq.symcore import ParseError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FIXING = 2
EXIT_BUDGET = 3

_STATUS_EXIT = {INTEGRABLE: EXIT_OK, PARAMETER_FIXING: EXIT_FIXING, BUDGET_EXCEEDED: EXIT_BUDGET}


class UsageError(ValueError):
    pass


def _err(message: str) -> None:
    print(f"hjq: {message}", file=sys.stderr)


def _load(path: str) -> tuple[ModelSource, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror or err}") from err
    return parse_model(text), text


def _prepare(path: str):
    src, text = _load(path)
    findings = validate_model(src)
    errors = [f for f in findings if f.severity == "error"]
    if errors:
        raise UsageError("; ".join(f.message for f in errors))
    model = src.build()
    cs = build_hjpde_set(model)
    return cs, constraint_closure(cs), text, findings


def parse_assignments(text: str) -> dict:
    """``"a=1, p_a=0"`` -> {"a": 1.0, "p_a": 0.0}."""
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, eq, value = part.partition("=")
        name = name.strip()
        if not eq or not name:
            raise UsageError(f"expected name=value, got {part!r}")
        if name in out:
            raise UsageError(f"{name} assigned twice")
        try:
            out[name] = float(value)
        except ValueError as err:
            raise UsageError(f"value for {name} is not a number: {value.strip()!r}") from err
    return out


def parse_waypoints(text: str) -> ParameterPath:
    """``"tau=0,N=1 ; tau=1,N=1"`` -> ParameterPath."""
    points = [parse_assignments(chunk) for chunk in text.split(";") if chunk.strip()]
    try:
        return ParameterPath(tuple(points))
    except ValueError as err:
        raise UsageError(str(err)) from err


def cmd_analyze(args) -> int:
    cs, closure, text, findings = _prepare(args.file)
    doc = build_report(cs, closure, text, findings)
    sys.stdout.write(to_json(doc) if args.format == "json" else to_text(doc))
    return _STATUS_EXIT[closure.status]


def cmd_flow(args) -> int:
    cs, closure, _, _ = _prepare(args.file)
    if closure.status != INTEGRABLE:
        _err(f"closure status is {closure.status}; flows need an integrable model")
        return _STATUS_EXIT[closure.status]
    path = parse_waypoints(args.path)
    initial = parse_assignments(args.initial)
    try:
        result = integrate_flow(cs, closure, path, initial, args.step)
    except InitialDataError as err:
        _err(str(err))
        return EXIT_ERROR
    stem = args.out or f"{cs.model.name}_flow"
    result.write_csv(f"{stem}.csv")
    result.write_json(f"{stem}.json")
    ok = result.max_constraint_residual < args.tol
    print(f"steps {len(result.rows) - 1}  max residual {result.max_constraint_residual:.3e}  "
          f"Z {result.action:.12g}")
    print(f"wrote {stem}.csv and {stem}.json")
    if not ok:
        _err(f"constraint residual {result.max_constraint_residual:.3e} exceeds tolerance {args.tol:g}")
    return EXIT_OK if ok else EXIT_ERROR


def cmd_corpus(args) -> int:
    records = None
    if args.expected:
        try:
            records = json.loads(Path(args.expected).read_text(encoding="utf-8"))
        except (OSError, ValueError) as err:
            raise UsageError(f"cannot load {args.expected}: {err}") from err
    failed = False
    for name in NAMES:
        bm = builtin(name)
        if records is not None:
            if name not in records:
                print(f"{name:20s} MISSING from {args.expected}")
                failed = True
                continue
            bm = type(bm)(bm.name, bm.source, bm.model, records[name])
        mismatches = compare_with_expected(bm)
        if mismatches:
            print(f"{name:20s} MISMATCH")
            for m in mismatches:
                print(f"  {m}")
            failed = True
        else:
            print(f"{name:20s} ok")
    return EXIT_ERROR if failed else EXIT_OK


def cmd_export(args) -> int:
    out = Path(args.directory)
    out.mkdir(parents=True, exist_ok=True)
    for name in NAMES:
        target = out / f"{name}.hjm"
        target.write_text(builtin(name).dsl_text, encoding="utf-8")
        print(target)
    return EXIT_OK


def cmd_version(args) -> int:
    print(f"hjq {__version__}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hjq", description="Hamilton-Jacobi analysis of singular Lagrangians")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run the canonical analysis and constraint closure")
    a.add_argument("file")
    a.add_argument("--format", choices=("text", "json"), default="text")
    a.set_defaults(func=cmd_analyze)

    f = sub.add_parser("flow", help="integrate the total differential equations along a path")
    f.add_argument("file")
    f.add_argument("--path", required=True, help='waypoints, e.g. "tau=0,N=1 ; tau=1,N=1"')
    f.add_argument("--initial", required=True, help='initial data, e.g. "a=1,p_a=0"')
    f.add_argument("--step", type=float, default=1e-3)
    f.add_argument("--tol", type=float, default=1e-6)
    f.add_argument("--out", help="output stem; writes STEM.csv and STEM.json")
    f.set_defaults(func=cmd_flow)

    c = sub.add_parser("corpus", help="check every builtin against its expected record")
    c.add_argument("--expected", help="alternative expected-records JSON file")
    c.set_defaults(func=cmd_corpus)

    e = sub.add_parser("export", help="write the builtin .hjm files to a directory")
    e.add_argument("directory")
    e.set_defaults(func=cmd_export)

    v = sub.add_parser("version", help="print the tool version")
    v.set_defaults(func=cmd_version)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DslError, ParseError, AnalysisError, FlowError, ValueError) as err:
        _err(str(err))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
