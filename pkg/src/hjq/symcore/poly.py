"""Sparse multivariate polynomials over the rationals.

Variables ("atoms") are :class:`Symbol` or canonical :class:`Func` nodes; both
expose ``sort_key``.  A monomial is a tuple of ``(atom, exponent)`` pairs sorted
by atom key.  Monomials compare in graded lexicographic order with the
earliest-created atom most significant.
"""

from __future__ import annotations

from fractions import Fraction

ONE_MONO: tuple = ()


class NotDivisible(ArithmeticError):
    pass


def _atom_key(atom):
    return atom.sort_key


def mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    merged = dict(m1)
    for atom, e in m2:
        merged[atom] = merged.get(atom, 0) + e
    return tuple(sorted(merged.items(), key=lambda t: t[0].sort_key))


def mono_div(m1: tuple, m2: tuple) -> tuple | None:
    """m1 / m2, or None when m2 does not divide m1."""
    d = dict(m1)
    for atom, e in m2:
        have = d.get(atom, 0)
        if have < e:
            return None
        if have == e:
            del d[atom]
        else:
            d[atom] = have - e
    return tuple(sorted(d.items(), key=lambda t: t[0].sort_key))


def mono_degree(m: tuple) -> int:
    return sum(e for _, e in m)


def grlex_key(m: tuple, ranking: dict) -> tuple:
    """Sort key for monomial ``m``; ``ranking`` maps atom -> position."""
    dense = [0] * len(ranking)
    for atom, e in m:
        dense[ranking[atom]] = e
    return (mono_degree(m), tuple(dense))


def make_ranking(atoms) -> dict:
    return {a: i for i, a in enumerate(sorted(atoms, key=_atom_key))}


class Poly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        # terms: monomial -> nonzero Fraction
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}
        self._hash = None

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({ONE_MONO: Fraction(c)})

    @classmethod
    def atom(cls, a) -> "Poly":
        return cls({((a, 1),): Fraction(1)})

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"Poly({self.sorted_terms()!r})"

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def const_value(self) -> Fraction:
        return self.terms.get(ONE_MONO, Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def atoms(self) -> set:
        return {a for m in self.terms for a, _ in m}

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def degree(self, atom) -> int:
        return max((e for m in self.terms for a, e in m if a == atom), default=0)

    def sorted_terms(self, ranking: dict | None = None) -> list:
        """Terms in descending graded lexicographic order."""
        if ranking is None:
            ranking = make_ranking(self.atoms())
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0], ranking), reverse=True)

    def leading_term(self, ranking: dict | None = None) -> tuple:
        if ranking is None:
            ranking = make_ranking(self.atoms())
        return max(self.terms.items(), key=lambda t: grlex_key(t[0], ranking))

    def leading_coeff(self) -> Fraction:
        return self.leading_term()[1]

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) - c
        return Poly(out)

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero() or other.is_zero():
            return Poly()
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        return Poly({m: v * c for m, v in self.terms.items()})

    def mul_mono(self, mono: tuple, c=1) -> "Poly":
        c = Fraction(c)
        return Poly({mono_mul(m, mono): v * c for m, v in self.terms.items()})

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def diff(self, atom) -> "Poly":
        """Partial derivative treating ``atom`` as an independent variable."""
        out: dict = {}
        for m, c in self.terms.items():
            for i, (a, e) in enumerate(m):
                if a == atom:
                    nm = m[:i] + (((a, e - 1),) if e > 1 else ()) + m[i + 1:]
                    out[nm] = out.get(nm, 0) + c * e
                    break
        return Poly(out)

    def coeffs_in(self, atom) -> dict:
        """Split into {exponent of atom: coefficient polynomial}."""
        parts: dict = {}
        for m, c in self.terms.items():
            e = 0
            rest = m
            for i, (a, k) in enumerate(m):
                if a == atom:
                    e = k
                    rest = m[:i] + m[i + 1:]
                    break
            parts.setdefault(e, {})[rest] = c
        return {e: Poly(t) for e, t in parts.items()}

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(1 / self.leading_coeff())

    def integer_content(self) -> Fraction:
        """Positive rational c such that self / c has coprime integer coefficients."""
        from math import gcd, lcm

        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den) if num else Fraction(1)

    def exact_div(self, other: "Poly") -> "Poly":
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if other.is_const():
            return self.scale(1 / other.const_value())
        ranking = make_ranking(self.atoms() | other.atoms())
        lm_b, lc_b = other.leading_term(ranking)
        rem = dict(self.terms)
        quot: dict = {}
        key = lambda m: grlex_key(m, ranking)  # noqa: E731
        while rem:
            lm_r = max(rem, key=key)
            t = mono_div(lm_r, lm_b)
            if t is None:
                raise NotDivisible("polynomial is not exactly divisible")
            c = rem[lm_r] / lc_b
            quot[t] = quot.get(t, 0) + c
            for m, v in other.terms.items():
                mm = mono_mul(m, t)
                nv = rem.get(mm, 0) - c * v
                if nv:
                    rem[mm] = nv
                else:
                    rem.pop(mm, None)
        return Poly(quot)

    def divides(self, other: "Poly") -> bool:
        try:
            other.exact_div(self)
        except NotDivisible:
            return False
        return True

    def evaluate(self, values: dict):
        total = 0
        for m, c in self.terms.items():
            term = c
            for a, e in m:
                term = term * values[a] ** e
            total = total + term
        return total


def _mono_gcd(a: Poly, b: Poly) -> Poly:
    # gcd of a monomial with an arbitrary polynomial: min exponents over all terms
    common: dict | None = None
    for p in (a, b):
        for m in p.terms:
            d = dict(m)
            if common is None:
                common = d
            else:
                common = {k: min(v, d[k]) for k, v in common.items() if k in d}
    mono = tuple(sorted((common or {}).items(), key=lambda t: t[0].sort_key))
    return Poly({mono: Fraction(1)})


def _content(p: Poly, x) -> Poly:
    g = Poly()
    for c in p.coeffs_in(x).values():
        g = gcd(g, c)
        if g.is_const():
            return Poly.const(1)
    return g


def _prem(a: Poly, b: Poly, x) -> Poly:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b in ``x``."""
    db = b.degree(x)
    lc_b = b.coeffs_in(x)[db]
    r = a
    steps = a.degree(x) - db + 1
    while not r.is_zero():
        dr = r.degree(x)
        if dr < db:
            break
        lc_r = r.coeffs_in(x)[dr]
        shift = ((x, dr - db),) if dr > db else ONE_MONO
        r = lc_b * r - (lc_r * b).mul_mono(shift)
        steps -= 1
    return r * lc_b ** steps if steps > 0 and not r.is_zero() else r


def _subresultant_gcd(a: Poly, b: Poly, x) -> Poly:
    # a, b primitive in x with deg a >= deg b; returns their gcd up to content
    g = h = Poly.const(1)
    while True:
        d = a.degree(x) - b.degree(x)
        r = _prem(a, b, x)
        if r.is_zero():
            return b
        if r.degree(x) == 0:
            return Poly.const(1)
        a, b = b, r.exact_div(g * h ** d)
        g = a.coeffs_in(x)[a.degree(x)]
        h = g ** d if d == 1 else (g ** d).exact_div(h ** (d - 1)) if d > 1 else h


def _primitive(p: Poly, x) -> Poly:
    # monic as well: over Q this keeps the PRS coefficients from growing
    return p.exact_div(_content(p, x)).monic()


def _specialize(p: Poly, x, point: dict) -> list:
    """Dense coefficients in ``x`` after fixing every other atom."""
    out = [Fraction(0)] * (p.degree(x) + 1)
    for mono, c in p.terms.items():
        k = 0
        for atom, e in mono:
            if atom == x:
                k = e
            else:
                c = c * point[atom] ** e
        out[k] += c
    return out


def _uni_gcd_degree(a: list, b: list) -> int:
    def trim(v):
        while v and v[-1] == 0:
            v.pop()
        return v

    a, b = trim(list(a)), trim(list(b))
    while b:
        while len(a) >= len(b):
            f = a[-1] / b[-1]
            shift = len(a) - len(b)
            for i, c in enumerate(b):
                a[shift + i] -= f * c
            trim(a)
            if not a:
                break
        a, b = b, a
    return len(a) - 1


def _coprime_by_specialization(a: Poly, b: Poly, shared: set) -> bool:
    """True only when gcd(a, b) is provably constant.

    A common factor of positive degree in some shared atom keeps that degree
    under any specialization of the other atoms that spares both leading
    coefficients, so a constant univariate gcd for every shared atom rules
    it out.  False means "not decided".
    """
    atoms = sorted(a.atoms() | b.atoms(), key=_atom_key)
    for x in sorted(shared, key=_atom_key):
        others = [t for t in atoms if t != x]
        for attempt in range(4):
            point = {t: Fraction(2 * k + 3 + 7 * attempt, k + 1) for k, t in enumerate(others)}
            ua, ub = _specialize(a, x, point), _specialize(b, x, point)
            if ua[-1] != 0 and ub[-1] != 0:
                break
        else:
            return False
        if _uni_gcd_degree(ua, ub) > 0:
            return False
    return True


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor (recursive subresultant PRS)."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_const() or b.is_const():
        return Poly.const(1)
    if a.is_monomial() or b.is_monomial():
        return _mono_gcd(a, b)
    atoms_a, atoms_b = a.atoms(), b.atoms()
    shared = atoms_a & atoms_b
    if not shared or _coprime_by_specialization(a, b, shared):
        return Poly.const(1)
    for p, q in ((a, b), (b, a)):
        if p.total_degree() <= q.total_degree() and p.divides(q):
            return p.monic()
    x = min(shared, key=lambda t: (max(a.degree(t), b.degree(t)), _atom_key(t)))
    ca, cb = _content(a, x), _content(b, x)
    pa, pb = a.exact_div(ca).monic(), b.exact_div(cb).monic()
    c = gcd(ca, cb)
    if pa.degree(x) < pb.degree(x):
        pa, pb = pb, pa
    pa = _subresultant_gcd(pa, pb, x)
    return (c * _primitive(pa, x)).monic()
