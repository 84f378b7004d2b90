"""Render expression trees in the input grammar, so printed text re-parses."""

from __future__ import annotations

from fractions import Fraction

from hjq.symcore.expr import Add, Div, Expr, Func, Mul, Num, Pow, Symbol


def _num(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _negated(e: Expr) -> Expr | None:
    """-e when e is written with a leading minus sign, else None."""
    if isinstance(e, Num) and e.value < 0:
        return Num(-e.value)
    if isinstance(e, Mul) and isinstance(e.factors[0], Num) and e.factors[0].value < 0:
        head = -e.factors[0].value
        rest = e.factors[1:]
        if head == 1:
            return rest[0] if len(rest) == 1 else Mul(rest)
        return Mul((Num(head),) + rest)
    if isinstance(e, Div):
        inner = _negated(e.num)
        if inner is not None:
            return Div(inner, e.den)
    return None


def _minus(e: Expr) -> str:
    text = to_string(e)
    return f"-({text})" if isinstance(e, Add) else f"-{text}"


def _factor(e: Expr, first: bool) -> str:
    if isinstance(e, (Add, Div)):
        return f"({to_string(e)})"
    if isinstance(e, Num):
        if e.value.denominator != 1 and not first:
            return f"({_num(e.value)})"
        if e.value < 0 and not first:
            return f"({_num(e.value)})"
    if isinstance(e, Mul):
        return f"({to_string(e)})"
    return to_string(e)


def _atomic(e: Expr) -> bool:
    return isinstance(e, (Symbol, Func)) or (
        isinstance(e, Num) and e.value >= 0 and e.value.denominator == 1
    )


def to_string(e: Expr) -> str:
    if isinstance(e, Num):
        return _num(e.value)
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    if isinstance(e, Pow):
        base = to_string(e.base) if _atomic(e.base) else f"({to_string(e.base)})"
        if e.exp < 0:
            return f"(1/{base}^{-e.exp})"
        return f"{base}^{e.exp}"
    if isinstance(e, Mul):
        neg = _negated(e)
        if neg is not None:
            return _minus(neg)
        return "*".join(_factor(f, i == 0) for i, f in enumerate(e.factors))
    if isinstance(e, Div):
        neg = _negated(e)
        if neg is not None:
            return _minus(neg)
        num = f"({to_string(e.num)})" if isinstance(e.num, (Add, Div)) else to_string(e.num)
        den = to_string(e.den) if _atomic(e.den) or isinstance(e.den, Pow) else f"({to_string(e.den)})"
        return f"{num}/{den}"
    if isinstance(e, Add):
        parts = []
        for i, t in enumerate(e.terms):
            neg = _negated(t)
            if i == 0:
                parts.append(to_string(t))
            elif neg is not None:
                parts.append(f" - {_factor_in_sum(neg)}")
            else:
                parts.append(f" + {_factor_in_sum(t)}")
        return "".join(parts)
    raise TypeError(f"cannot print {e!r}")


def _factor_in_sum(e: Expr) -> str:
    return f"({to_string(e)})" if isinstance(e, Add) else to_string(e)
