"""Rational functions in lowest terms, and conversion to and from trees."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm

from hjq.symcore.expr import Add, Div, Expr, Func, Mul, Num, Pow, Symbol
from hjq.symcore.poly import Poly, gcd, make_ranking


class RatFunc:
    """num/den with gcd removed and a monic denominator.

    Normalization makes the pair unique, so equality of normal forms is
    equality of rational functions.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, *, normalized: bool = False):
        if den is None:
            den = Poly.const(1)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls(Poly.const(c), normalized=True)

    @classmethod
    def atom(cls, a) -> "RatFunc":
        return cls(Poly.atom(a), normalized=True)

    def __eq__(self, other):
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({self.num!r}, {self.den!r})"

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def is_polynomial(self) -> bool:
        return self.den.is_const()

    def atoms(self) -> set:
        return self.num.atoms() | self.den.atoms()

    def __add__(self, other: "RatFunc") -> "RatFunc":
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        a, b, c, d = self.num, self.den, other.num, other.den
        if b.is_const() and d.is_const():
            return RatFunc(a + c, normalized=True)
        # both operands are reduced, so only the shared part of the
        # denominators can cancel against the new numerator
        g = gcd(b, d)
        if g.is_const():
            return from_reduced(a * d + c * b, b * d)
        b1, d1 = b.exact_div(g), d.exact_div(g)
        t = a * d1 + c * b1
        if t.is_zero():
            return RatFunc(Poly(), normalized=True)
        h = gcd(t, g)
        return from_reduced(t.exact_div(h), b1 * d1 * g.exact_div(h))

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, normalized=True)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return self + (-other)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        if self.is_zero() or other.is_zero():
            return RatFunc(Poly(), normalized=True)
        a, b, c, d = self.num, self.den, other.num, other.den
        if b.is_const() and d.is_const():
            return RatFunc(a * c, normalized=True)
        g1, g2 = gcd(a, d), gcd(c, b)
        return from_reduced(a.exact_div(g1) * c.exact_div(g2), b.exact_div(g2) * d.exact_div(g1))

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("division by zero expression")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        return self * other.inverse()

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.inverse() ** (-n)
        # powers of a reduced fraction with monic denominator stay reduced
        return RatFunc(self.num ** n, self.den ** n, normalized=True)


def from_reduced(num: Poly, den: Poly) -> RatFunc:
    """Wrap a pair already free of common factors, making ``den`` monic."""
    if num.is_zero():
        return RatFunc(Poly(), normalized=True)
    lc = den.leading_coeff()
    if lc != 1:
        num, den = num.scale(1 / lc), den.scale(1 / lc)
    return RatFunc(num, den, normalized=True)


def _normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if num.is_zero():
        return Poly(), Poly.const(1)
    if den.is_const():
        c = den.const_value()
        return (num if c == 1 else num.scale(1 / c)), Poly.const(1)
    g = gcd(num, den)
    if not g.is_const():
        num = num.exact_div(g)
        den = den.exact_div(g)
    lc = den.leading_coeff()
    if lc != 1:
        num = num.scale(1 / lc)
        den = den.scale(1 / lc)
    return num, den


def _atom_for(node: Expr):
    if isinstance(node, Symbol):
        return node
    arg = canonical_expr(node.arg)
    return Func(node.name, arg)


@lru_cache(maxsize=65536)
def to_ratfunc(e: Expr) -> RatFunc:
    if isinstance(e, Num):
        return RatFunc.const(e.value)
    if isinstance(e, (Symbol, Func)):
        return RatFunc.atom(_atom_for(e))
    if isinstance(e, Add):
        out = RatFunc.const(0)
        for t in e.terms:
            out = out + to_ratfunc(t)
        return out
    if isinstance(e, Mul):
        out = RatFunc.const(1)
        for f in e.factors:
            out = out * to_ratfunc(f)
        return out
    if isinstance(e, Pow):
        return to_ratfunc(e.base) ** e.exp
    if isinstance(e, Div):
        return to_ratfunc(e.num) / to_ratfunc(e.den)
    raise TypeError(f"not an expression: {e!r}")


def _monomial_tree(mono: tuple, coeff: Fraction) -> Expr:
    factors: list[Expr] = []
    if coeff != 1 or not mono:
        factors.append(Num(coeff))
    for atom, e in mono:
        factors.append(atom if e == 1 else Pow(atom, e))
    return factors[0] if len(factors) == 1 else Mul(factors)


def poly_tree(p: Poly, ranking: dict | None = None) -> Expr:
    if p.is_zero():
        return Num(0)
    terms = [_monomial_tree(m, c) for m, c in p.sorted_terms(ranking)]
    return terms[0] if len(terms) == 1 else Add(terms)


def from_ratfunc(r: RatFunc) -> Expr:
    """Deterministic tree for a normalized rational function."""
    ranking = make_ranking(r.atoms())
    if r.den.is_const():
        return poly_tree(r.num, ranking)
    # integer, primitive denominator with positive leading coefficient
    den_scale = Fraction(lcm(*(c.denominator for c in r.den.terms.values())))
    den_int = r.den.scale(den_scale)
    den_int = den_int.scale(1 / den_int.integer_content())
    num = r.num.scale(den_int.leading_coeff())
    content = num.integer_content()
    lead = num.leading_term(ranking)[1]
    if lead < 0:
        content = -content
    num_prim = num.scale(1 / content)
    num_k, den_k = content.numerator, content.denominator
    num_tree = poly_tree(num_prim.scale(num_k), ranking)
    den_tree = poly_tree(den_int.scale(den_k), ranking)
    return Div(num_tree, den_tree)


@lru_cache(maxsize=65536)
def canonical_expr(e: Expr) -> Expr:
    return from_ratfunc(to_ratfunc(e))
