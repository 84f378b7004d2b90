"""Poisson brackets, total differential equations and constraint closure.

The closure loop demands that every Hamilton-Jacobi generator and every
adopted constraint stays zero along the multi-parameter flow.  A bracket
with ``H'_0`` that does not vanish on the current constraint surface becomes a
constraint of the next generation.  A bracket with some ``H'_mu`` that does not
vanish instead ties ``dt_mu`` to the other parameter differentials; that
parameter stops being free and the report is marked ``parameter-fixing``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from hjq.canonical import CanonicalSystem
from hjq.symcore import Expr, Func, Num, Symbol, ZeroVerdict, zero_test
from hjq.symcore.canonical import diff_ratfunc, subst_ratfunc
from hjq.symcore.poly import make_ranking
from hjq.symcore.ratfunc import RatFunc, from_ratfunc, to_ratfunc

INTEGRABLE = "integrable"
PARAMETER_FIXING = "parameter-fixing"
BUDGET_EXCEEDED = "budget-exceeded"


class VelocityPresent(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class OneForm:
    """Coefficients of dt_alpha, in parameter order; zero entries are kept."""

    coefficients: dict

    def coefficient(self, t: Symbol) -> Expr:
        return self.coefficients.get(t, Num(0))

    def __str__(self):
        return " + ".join(f"({c})*d{t.name}" for t, c in self.coefficients.items())


@dataclass(frozen=True)
class ActionForm:
    form: OneForm


@dataclass(frozen=True)
class ConstraintRecord:
    expression: Expr
    generation: int
    origin: tuple[str, str]
    label: str = ""


@dataclass(frozen=True)
class Fixing:
    parameter: Symbol | None
    origin: tuple[str, str]
    bracket: Expr


@dataclass
class ClosureReport:
    generations: list
    status: str
    independent_parameters: list
    fixings: list = field(default_factory=list)
    probabilistic: bool = False

    @property
    def constraints(self) -> list[ConstraintRecord]:
        return [c for gen in self.generations for c in gen]


# --- brackets ----------------------------------------------------------------

def _check_velocity_free(r: RatFunc, what: str) -> None:
    for a in r.atoms():
        syms = a.arg.free_symbols() if isinstance(a, Func) else {a}
        bad = [s.name for s in syms if s.kind == "velocity"]
        if bad:
            raise VelocityPresent(f"{what} contains velocity symbol(s) {', '.join(sorted(bad))}")


def bracket_rf(a: RatFunc, b: RatFunc, cs: CanonicalSystem) -> RatFunc:
    out = RatFunc.const(0)
    for q, p in cs.canonical_pairs():
        da_q = diff_ratfunc(a, q)
        db_p = diff_ratfunc(b, p)
        if not (da_q.is_zero() or db_p.is_zero()):
            out = out + da_q * db_p
        da_p = diff_ratfunc(a, p)
        db_q = diff_ratfunc(b, q)
        if not (da_p.is_zero() or db_q.is_zero()):
            out = out - da_p * db_q
    return out


def poisson_bracket(a: Expr, b: Expr, cs: CanonicalSystem) -> Expr:
    """{A, B} over every canonical pair, extended pairs included."""
    ra, rb = to_ratfunc(a), to_ratfunc(b)
    _check_velocity_free(ra, "left argument")
    _check_velocity_free(rb, "right argument")
    return from_ratfunc(bracket_rf(ra, rb, cs))


def total_differential(f: Expr, cs: CanonicalSystem) -> OneForm:
    """dF = sum_alpha {F, H'_alpha} dt_alpha."""
    gens = cs.generators()
    return OneForm({t: poisson_bracket(f, h, cs) for t, h in gens.items()})


def action_one_form(cs: CanonicalSystem) -> ActionForm:
    """dZ with coefficient -H_alpha + sum_a p_a dH'_alpha/dp_a."""
    gens = cs.generators()
    coeffs = {}
    for t, h in gens.items():
        rh = to_ratfunc(h)
        total = -to_ratfunc(cs.h_alpha(t))
        for _, p in cs.expressible_pairs():
            total = total + RatFunc.atom(p) * diff_ratfunc(rh, p)
        coeffs[t] = from_ratfunc(total)
    return ActionForm(OneForm(coeffs))


# --- reduction modulo constraints -----------------------------------------------

def _phase_symbol(s) -> bool:
    return isinstance(s, Symbol) and s.kind in ("coordinate", "momentum")


def _solve_for(r: RatFunc):
    """(symbol, value) making ``r`` vanish, or None.

    Picks the earliest-created phase-space symbol that appears with degree one
    in the numerator and nowhere inside a function atom.
    """
    num = r.num
    in_funcs = set()
    for a in num.atoms():
        if isinstance(a, Func):
            in_funcs |= a.arg.free_symbols()
    ranking = make_ranking(num.atoms())
    for s in sorted(ranking, key=lambda a: a.sort_key):
        if not _phase_symbol(s) or s in in_funcs or num.degree(s) != 1:
            continue
        parts = num.coeffs_in(s)
        coeff = RatFunc(parts[1], normalized=True)
        rest = RatFunc(parts[0], normalized=True) if 0 in parts else RatFunc.const(0)
        return s, -rest / coeff
    return None


class Reducer:
    """Weak-equality test: rewrite with solved constraints, then test divisibility."""

    def __init__(self):
        self.rules: dict = {}
        self.kept: list = []  # numerators of constraints with no linear handle

    def reduce(self, r: RatFunc) -> RatFunc:
        return subst_ratfunc(r, self.rules) if self.rules else r

    def is_weak_zero(self, r: RatFunc) -> ZeroVerdict:
        r = self.reduce(r)
        if r.is_zero():
            return ZeroVerdict.ZERO
        for g in self.kept:
            if g.divides(r.num):
                return ZeroVerdict.ZERO
        return zero_test(from_ratfunc(r))

    def add(self, r: RatFunc, solve_for: Symbol | None = None) -> None:
        r = self.reduce(r)
        if solve_for is not None and r.num.degree(solve_for) == 1:
            parts = r.num.coeffs_in(solve_for)
            rest = RatFunc(parts[0], normalized=True) if 0 in parts else RatFunc.const(0)
            solved = solve_for, -rest / RatFunc(parts[1], normalized=True)
        else:
            solved = _solve_for(r)
        if solved is None:
            if not r.num.is_const():
                self.kept.append(r.num)
            return
        s, value = solved
        self.rules = {k: subst_ratfunc(v, {s: value}) for k, v in self.rules.items()}
        self.rules[s] = value
        self.kept = [subst_ratfunc(RatFunc(g, normalized=True), {s: value}).num for g in self.kept]


def _sign_normalized(r: RatFunc) -> RatFunc:
    ranking = make_ranking(r.atoms())
    if not r.num.is_zero() and r.num.leading_term(ranking)[1] < 0:
        return -r
    return r


def _primary_reducer(cs: CanonicalSystem) -> Reducer:
    red = Reducer()
    for q in cs.unexpressible_coordinates:
        red.add(to_ratfunc(cs.momenta[q] + cs.h_mu[q]), solve_for=cs.momenta[q])
    return red


# --- integrability ---------------------------------------------------------

def check_integrability(cs: CanonicalSystem, constraints) -> list[Expr]:
    """Brackets among generators and constraints that are not weakly zero."""
    red = _primary_reducer(cs)
    for c in constraints:
        red.add(to_ratfunc(c.expression))
    gens = cs.generators()
    items = [to_ratfunc(gens[t]) for t in cs.parameter_times[1:]]
    items += [to_ratfunc(c.expression) for c in constraints]
    targets = [to_ratfunc(h) for h in gens.values()]
    out = []
    seen = set()
    for i, g in enumerate(items):
        for h in targets + items[i + 1:]:
            b = red.reduce(bracket_rf(g, h, cs))
            if red.is_weak_zero(b):
                continue
            key = _sign_normalized(b)
            if key not in seen:
                seen.add(key)
                out.append(from_ratfunc(b))
    return out


def constraint_closure(cs: CanonicalSystem, budget: int | None = None) -> ClosureReport:
    """Iterate the bracket passes; ``budget`` defaults to the phase-space dimension 2n."""
    model = cs.model
    budget = 2 * model.n if budget is None else budget
    gens = cs.generators()
    h0_time = model.tau
    mu_times = list(cs.parameter_times[1:])
    free = list(cs.parameter_times)
    red = _primary_reducer(cs)
    generations: list[list[ConstraintRecord]] = []
    fixings: list[Fixing] = []
    probabilistic = False
    status = INTEGRABLE

    def weak_zero(b: RatFunc) -> bool:
        nonlocal probabilistic
        verdict = red.is_weak_zero(b)
        if verdict is ZeroVerdict.PROBABLY_ZERO:
            probabilistic = True
        return bool(verdict)

    # items checked in a pass: (label, ratfunc)
    pending = [(cs.label(t), to_ratfunc(gens[t])) for t in mu_times]
    adopted: list[tuple[str, RatFunc]] = []
    while pending:
        candidates = []
        for label, g in pending:
            fixed_here = False
            for t in mu_times:
                b = red.reduce(bracket_rf(g, to_ratfunc(gens[t]), cs))
                if weak_zero(b):
                    continue
                target = t if t in free and not fixed_here else None
                if target is not None:
                    free.remove(target)
                fixings.append(Fixing(target, (label, cs.label(t)), from_ratfunc(b)))
                fixed_here = True
            if fixed_here:
                continue
            b0 = red.reduce(bracket_rf(g, to_ratfunc(gens[h0_time]), cs))
            if not weak_zero(b0):
                candidates.append(((label, cs.label(h0_time)), b0))
        # constraints must also commute among themselves on the surface
        for i, (li, gi) in enumerate(pending):
            for lj, gj in adopted + pending[:i]:
                if not li.startswith("C") or not lj.startswith("C"):
                    continue
                b = red.reduce(bracket_rf(gi, gj, cs))
                if not weak_zero(b):
                    fixings.append(Fixing(None, (li, lj), from_ratfunc(b)))
        adopted.extend(p for p in pending if p[0].startswith("C"))
        new_gen: list[ConstraintRecord] = []
        for origin, b in candidates:
            b = red.reduce(b)
            if weak_zero(b):
                continue
            b = _sign_normalized(b)
            label = f"C{len(generations) + 1}.{len(new_gen) + 1}"
            new_gen.append(ConstraintRecord(from_ratfunc(b), len(generations) + 1, origin, label))
            red.add(b)
        if not new_gen:
            break
        generations.append(new_gen)
        if len(generations) > budget:
            status = BUDGET_EXCEEDED
            break
        pending = [(c.label, to_ratfunc(c.expression)) for c in new_gen]
    if status != BUDGET_EXCEEDED and fixings:
        status = PARAMETER_FIXING
    return ClosureReport(generations, status, free, fixings, probabilistic)


def second_class_probe(cs: CanonicalSystem, report: ClosureReport) -> str:
    """Describe which parameter differentials the closure pinned down."""
    if report.status != PARAMETER_FIXING:
        raise PreconditionError(f"closure status is {report.status}, not {PARAMETER_FIXING}")
    named = {c.label: c for c in report.constraints}
    lines = []
    for fx in report.fixings:
        left, right = fx.origin
        left_desc = f"{left} = {named[left].expression}" if left in named else left
        right_desc = f"{right} = {named[right].expression}" if right in named else right
        if fx.parameter is not None:
            lines.append(
                f"d{fx.parameter.name} forced by [{left_desc}, {right_desc}] = {fx.bracket}"
            )
        else:
            lines.append(f"non-vanishing bracket [{left_desc}, {right_desc}] = {fx.bracket}")
    return "\n".join(lines)
