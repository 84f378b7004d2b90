"""Immutable expression trees.

Nodes are hashed once at construction and compared structurally.  No
simplification happens here beyond flattening nested sums and products;
normal forms live in :mod:`hjq.symcore.canonical`.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from numbers import Rational

FUNCTIONS = ("sqrt", "sin", "cos", "exp", "log")

KINDS = ("coordinate", "velocity", "momentum", "parameter-time", "constant")

# free-standing symbols order after any table-created symbol
_symbol_counter = itertools.count(1_000_000)


class Expr:
    __slots__ = ("_hash",)

    def __hash__(self):
        return self._hash

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        # defining __eq__ in a subclass would otherwise drop the cached hash
        cls.__hash__ = Expr.__hash__

    def __add__(self, other):
        return Add.of(self, as_expr(other))

    def __radd__(self, other):
        return Add.of(as_expr(other), self)

    def __sub__(self, other):
        return Add.of(self, -as_expr(other))

    def __rsub__(self, other):
        return Add.of(as_expr(other), -self)

    def __neg__(self):
        return Mul.of(Num(-1), self)

    def __mul__(self, other):
        return Mul.of(self, as_expr(other))

    def __rmul__(self, other):
        return Mul.of(as_expr(other), self)

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def __pow__(self, exp):
        if not isinstance(exp, int):
            raise TypeError("only integer powers are supported; use sqrt() for roots")
        return Pow(self, exp)

    def __str__(self):
        from hjq.symcore.printing import to_string

        return to_string(self)

    def children(self) -> tuple:
        return ()

    def walk(self):
        """Yield every node of the tree, parents before children."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children()))

    def free_symbols(self) -> frozenset:
        return frozenset(n for n in self.walk() if isinstance(n, Symbol))

    def has_functions(self) -> bool:
        return any(isinstance(n, Func) for n in self.walk())


class Num(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        value = Fraction(value)
        self.value = value
        self._hash = hash(("Num", value))

    def __eq__(self, other):
        return isinstance(other, Num) and other.value == self.value

    def __repr__(self):
        return f"Num({self.value})"


class Symbol(Expr):
    """A named variable.

    Identity is ``(name, order)``.  ``order`` is the creation index that fixes
    the monomial order; symbol tables number their symbols from zero, so equal
    models produce equal symbols.  ``partner`` links a velocity or momentum to
    the coordinate (or parameter time) it belongs to.
    """

    __slots__ = ("name", "kind", "order", "partner", "sort_key")

    def __init__(self, name: str, kind: str = "constant", order: int | None = None,
                 partner: str | None = None):
        if kind not in KINDS:
            raise ValueError(f"unknown symbol kind {kind!r}")
        self.name = name
        self.kind = kind
        self.order = next(_symbol_counter) if order is None else order
        self.partner = partner
        self.sort_key = (0, self.order, name)
        self._hash = hash(("Symbol", name, self.order))

    def __eq__(self, other):
        return isinstance(other, Symbol) and other.name == self.name and other.order == self.order

    def __repr__(self):
        return f"Symbol({self.name!r}, {self.kind!r})"


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = tuple(terms)
        self._hash = hash(("Add", self.terms))

    @classmethod
    def of(cls, *items):
        flat = []
        for item in items:
            flat.extend(item.terms if isinstance(item, Add) else (item,))
        return flat[0] if len(flat) == 1 else cls(flat)

    def children(self):
        return self.terms

    def __eq__(self, other):
        return isinstance(other, Add) and other.terms == self.terms

    def __repr__(self):
        return f"Add{self.terms!r}"


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        self.factors = tuple(factors)
        self._hash = hash(("Mul", self.factors))

    @classmethod
    def of(cls, *items):
        flat = []
        for item in items:
            flat.extend(item.factors if isinstance(item, Mul) else (item,))
        return flat[0] if len(flat) == 1 else cls(flat)

    def children(self):
        return self.factors

    def __eq__(self, other):
        return isinstance(other, Mul) and other.factors == self.factors

    def __repr__(self):
        return f"Mul{self.factors!r}"


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: int):
        if isinstance(exp, bool) or not isinstance(exp, int):
            raise TypeError("Pow exponent must be an int")
        self.base = base
        self.exp = exp
        self._hash = hash(("Pow", base, exp))

    def children(self):
        return (self.base,)

    def __eq__(self, other):
        return isinstance(other, Pow) and other.exp == self.exp and other.base == self.base

    def __repr__(self):
        return f"Pow({self.base!r}, {self.exp})"


class Div(Expr):
    __slots__ = ("num", "den")

    def __init__(self, num: Expr, den: Expr):
        self.num = num
        self.den = den
        self._hash = hash(("Div", num, den))

    def children(self):
        return (self.num, self.den)

    def __eq__(self, other):
        return isinstance(other, Div) and other.num == self.num and other.den == self.den

    def __repr__(self):
        return f"Div({self.num!r}, {self.den!r})"


class Func(Expr):
    """Application of one of :data:`FUNCTIONS` to a single argument."""

    __slots__ = ("name", "arg", "_sort_key")

    def __init__(self, name: str, arg: Expr):
        if name not in FUNCTIONS:
            raise ValueError(f"unknown function {name!r}")
        self.name = name
        self.arg = arg
        self._sort_key = None
        self._hash = hash(("Func", name, arg))

    @property
    def sort_key(self):
        # function atoms order after every symbol
        if self._sort_key is None:
            self._sort_key = (1, self.name, str(self.arg))
        return self._sort_key

    def children(self):
        return (self.arg,)

    def __eq__(self, other):
        return isinstance(other, Func) and other.name == self.name and other.arg == self.arg

    def __repr__(self):
        return f"Func({self.name!r}, {self.arg!r})"


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Rational)) and not isinstance(value, bool):
        return Num(value)
    if isinstance(value, str):
        return Num(Fraction(value))
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


def symbols(names: str, kind: str = "constant") -> tuple[Symbol, ...]:
    """Create symbols in creation order from a whitespace separated string."""
    return tuple(Symbol(n, kind) for n in names.split())


def sqrt(e) -> Func:
    return Func("sqrt", as_expr(e))


def sin(e) -> Func:
    return Func("sin", as_expr(e))


def cos(e) -> Func:
    return Func("cos", as_expr(e))


def exp(e) -> Func:
    return Func("exp", as_expr(e))


def log(e) -> Func:
    return Func("log", as_expr(e))
