"""Canonical forms, zero testing, differentiation and substitution."""

from __future__ import annotations

import cmath
import enum
import math
import random
from fractions import Fraction

from hjq.symcore.expr import Expr, Func, Symbol
from hjq.symcore.poly import Poly, gcd
from hjq.symcore.ratfunc import RatFunc, canonical_expr, from_ratfunc, from_reduced, to_ratfunc

N_PROBE = 16
PROBE_SEED = 20_071_113
PROBE_TOL = 1e-10


class ZeroVerdict(enum.Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    PROBABLY_ZERO = "probabilistically zero"

    def __bool__(self):
        return self is not ZeroVerdict.NONZERO


class CyclicBinding(ValueError):
    pass


def canonical_form(e: Expr) -> Expr:
    """Single quotient of coprime polynomials, monomials in grlex order."""
    return canonical_expr(e)


def same(a: Expr, b: Expr) -> bool:
    """Exact equality of normal forms (no numeric fallback)."""
    return to_ratfunc(a) == to_ratfunc(b)


def zero_test(e: Expr) -> ZeroVerdict:
    r = to_ratfunc(e)
    if r.is_zero():
        return ZeroVerdict.ZERO
    if not any(isinstance(a, Func) for a in r.num.atoms()):
        return ZeroVerdict.NONZERO
    rng = random.Random(PROBE_SEED)
    names = sorted({s for s in canonical_form(e).free_symbols()}, key=lambda s: s.sort_key)
    for _ in range(N_PROBE):
        point = {s: Fraction(rng.randint(100, 10_000), 100) for s in names}
        try:
            value = evaluate(e, point, complex_ok=True)
        except (ZeroDivisionError, ValueError, OverflowError):
            return ZeroVerdict.NONZERO
        if not abs(value) < PROBE_TOL:
            return ZeroVerdict.NONZERO
    return ZeroVerdict.PROBABLY_ZERO


def equals_zero(e: Expr) -> bool:
    return bool(zero_test(e))


# --- differentiation -------------------------------------------------------

def _func_derivative(atom: Func, s: Symbol) -> RatFunc:
    darg = _d_ratfunc(to_ratfunc(atom.arg), s)
    if darg.is_zero():
        return darg
    name = atom.name
    if name == "sqrt":
        outer = RatFunc(Poly.const(1), Poly.atom(atom).scale(2))
    elif name == "sin":
        outer = RatFunc.atom(Func("cos", atom.arg))
    elif name == "cos":
        outer = -RatFunc.atom(Func("sin", atom.arg))
    elif name == "exp":
        outer = RatFunc.atom(atom)
    else:  # log
        outer = to_ratfunc(atom.arg).inverse()
    return outer * darg


def _d_poly(p: Poly, s: Symbol) -> RatFunc:
    out = RatFunc(p.diff(s), normalized=True) if s in p.atoms() else RatFunc.const(0)
    for atom in p.atoms():
        if isinstance(atom, Func) and s in atom.arg.free_symbols():
            out = out + RatFunc(p.diff(atom), normalized=True) * _func_derivative(atom, s)
    return out


def _d_ratfunc(r: RatFunc, s: Symbol) -> RatFunc:
    dn = _d_poly(r.num, s)
    if r.den.is_const():
        return dn
    dd = _d_poly(r.den, s)
    if dn.is_polynomial() and dd.is_polynomial():
        # gcd(N'D - ND', D) divides gcd(D, D') because gcd(N, D) = 1
        n, d, n1, d1 = r.num, r.den, dn.num, dd.num
        g = gcd(d, d1)
        if g.is_const():
            return from_reduced(n1 * d - n * d1, d * d)
        dr = d.exact_div(g)
        return RatFunc(n1 * dr - n * d1.exact_div(g), dr * d)
    den = RatFunc(r.den, normalized=True)
    return dn / den - RatFunc(r.num, normalized=True) * dd / (den * den)


def diff_ratfunc(r: RatFunc, s: Symbol) -> RatFunc:
    return _d_ratfunc(r, s)


def differentiate(e: Expr, s: Symbol) -> Expr:
    """Exact partial derivative of ``e`` with respect to ``s``, canonicalized."""
    return from_ratfunc(_d_ratfunc(to_ratfunc(e), s))


# --- substitution ----------------------------------------------------------

def _check_acyclic(bindings: dict) -> None:
    graph = {s: {t for t in v.free_symbols() if t in bindings} for s, v in bindings.items()}
    state: dict = {}

    def visit(node, trail):
        mark = state.get(node)
        if mark == "done":
            return
        if mark == "active":
            cycle = trail[trail.index(node):] + [node]
            raise CyclicBinding("cyclic binding: " + " -> ".join(s.name for s in cycle))
        state[node] = "active"
        for nxt in sorted(graph[node], key=lambda s: s.sort_key):
            visit(nxt, trail + [node])
        state[node] = "done"

    for s in sorted(graph, key=lambda s: s.sort_key):
        visit(s, [])


def _subst_poly(p: Poly, values: dict) -> RatFunc:
    out = RatFunc.const(0)
    powers: dict = {}
    for mono, c in p.terms.items():
        term = RatFunc.const(c)
        for atom, e in mono:
            key = (atom, e)
            if key not in powers:
                powers[key] = values(atom) ** e
            term = term * powers[key]
        out = out + term
    return out


def subst_ratfunc(r: RatFunc, bindings: dict) -> RatFunc:
    """Simultaneous substitution of ``{Symbol: RatFunc}`` into ``r``."""
    if not bindings:
        return r
    bound = set(bindings)
    cache: dict = {}

    def value(atom):
        if atom in cache:
            return cache[atom]
        if isinstance(atom, Symbol):
            v = bindings[atom] if atom in bindings else RatFunc.atom(atom)
        elif atom.arg.free_symbols() & bound:
            new_arg = from_ratfunc(subst_ratfunc(to_ratfunc(atom.arg), bindings))
            v = to_ratfunc(Func(atom.name, new_arg))
        else:
            v = RatFunc.atom(atom)
        cache[atom] = v
        return v

    if not (r.atoms() & bound) and not any(
        isinstance(a, Func) and a.arg.free_symbols() & bound for a in r.atoms()
    ):
        return r
    num = _subst_poly(r.num, value)
    if r.den.is_const():
        return num
    return num / _subst_poly(r.den, value)


def substitute(e: Expr, bindings: dict) -> Expr:
    """Replace symbols simultaneously, then canonicalize.

    Raises :class:`CyclicBinding` when a bound symbol's replacement refers
    (directly or through other bindings) back to itself.
    """
    bindings = {s: v for s, v in bindings.items()}
    _check_acyclic(bindings)
    rb = {s: to_ratfunc(v) for s, v in bindings.items()}
    return from_ratfunc(subst_ratfunc(to_ratfunc(e), rb))


# --- numeric evaluation ----------------------------------------------------

_REAL = {"sqrt": math.sqrt, "sin": math.sin, "cos": math.cos, "exp": math.exp, "log": math.log}
_COMPLEX = {"sqrt": cmath.sqrt, "sin": cmath.sin, "cos": cmath.cos, "exp": cmath.exp,
            "log": cmath.log}


def evaluate(e: Expr, point: dict, complex_ok: bool = False):
    """Evaluate numerically; ``point`` maps Symbol -> number."""
    funcs = _COMPLEX if complex_ok else _REAL
    r = to_ratfunc(e)

    def atom_value(atom):
        if isinstance(atom, Symbol):
            v = point[atom]
            return complex(v) if complex_ok else float(v)
        return funcs[atom.name](_eval_rf(to_ratfunc(atom.arg), atom_value))

    return _eval_rf(r, atom_value)


def _eval_rf(r: RatFunc, atom_value):
    values = {a: atom_value(a) for a in r.atoms()}
    num = _eval_poly(r.num, values)
    den = _eval_poly(r.den, values)
    if den == 0:
        raise ZeroDivisionError("expression is singular at this point")
    return num / den


def _eval_poly(p: Poly, values: dict):
    total = 0.0
    for mono, c in p.terms.items():
        term = float(c)
        for a, k in mono:
            term *= values[a] ** k
        total += term
    return total
