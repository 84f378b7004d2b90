"""Symbolic matrices: generic rank and exact linear solves."""

from __future__ import annotations

from collections.abc import Sequence

from hjq.symcore.canonical import ZeroVerdict, diff_ratfunc, subst_ratfunc, zero_test
from hjq.symcore.expr import Expr, Func, Symbol
from hjq.symcore.poly import Poly
from hjq.symcore.ratfunc import RatFunc, from_ratfunc, to_ratfunc


class LinearSolveError(ValueError):
    pass


class NonlinearInUnknown(LinearSolveError):
    def __init__(self, equation: int, unknown: Symbol):
        super().__init__(f"equation {equation} is not linear in {unknown.name}")
        self.equation = equation
        self.unknown = unknown


class InconsistentSystem(LinearSolveError):
    def __init__(self, equation: int):
        super().__init__(f"linear system is inconsistent (equation {equation} reduces to a nonzero constant)")
        self.equation = equation


class UnderdeterminedSystem(LinearSolveError):
    """No unique solution: ``free`` lists the unknowns left undetermined."""

    def __init__(self, free: list[Symbol], rows: list[int]):
        names = ", ".join(s.name for s in free)
        super().__init__(f"coefficient block is not invertible; undetermined: {names}")
        self.free = free
        self.rows = rows


class ExprMatrix:
    """Rectangular grid of canonical expressions."""

    def __init__(self, rows: Sequence[Sequence[Expr]]):
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and column")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        self._rf = [[to_ratfunc(e) for e in r] for r in rows]
        self.entries = tuple(tuple(from_ratfunc(x) for x in r) for r in self._rf)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, ExprMatrix) and self.entries == other.entries

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in r) for r in self.entries)
        return f"ExprMatrix[{body}]"

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExprMatrix":
        return ExprMatrix([[self.entries[i][j] for j in cols] for i in rows])

    def ratfuncs(self) -> list[list[RatFunc]]:
        return [list(r) for r in self._rf]

    def to_lists(self) -> list[list[str]]:
        return [[str(e) for e in r] for r in self.entries]


def _nonzero(r: RatFunc) -> bool:
    if r.is_zero():
        return False
    return zero_test(from_ratfunc(r)) is ZeroVerdict.NONZERO


def _bareiss(m: list[list[RatFunc]], ncols: int):
    """Fraction-free elimination in place; yields (row, col) of each pivot.

    Pivot search takes the lowest remaining row, then the lowest remaining
    column of that row.
    """
    rows = list(range(len(m)))
    cols = list(range(ncols))
    prev = RatFunc.const(1)
    while rows and cols:
        pivot = next(((r, c) for r in rows for c in cols if _nonzero(m[r][c])), None)
        if pivot is None:
            return
        pr, pc = pivot
        p = m[pr][pc]
        rows.remove(pr)
        cols.remove(pc)
        for i in rows:
            f = m[i][pc]
            for j in range(len(m[i])):
                if j == pc or j in cols or j >= ncols:
                    m[i][j] = (p * m[i][j] - f * m[pr][j]) / prev
        prev = p
        yield pr, pc


def _nonzero_poly(p: Poly) -> bool:
    return not p.is_zero() and _nonzero(RatFunc(p, normalized=True))


def matrix_rank(m: ExprMatrix) -> int:
    """Generic symbolic rank (pivots tested with the zero test).

    Rows are cleared of denominators first, so the elimination runs on
    polynomials where every Bareiss division is exact and no gcd is needed.
    """
    work = []
    for row in m.ratfuncs():
        common = Poly.const(1)
        for x in row:
            common = common * x.den
        work.append([x.num * common.exact_div(x.den) for x in row])
    rows, cols = list(range(m.rows)), list(range(m.cols))
    prev = Poly.const(1)
    rank = 0
    while rows and cols:
        pivot = next(((r, c) for r in rows for c in cols if _nonzero_poly(work[r][c])), None)
        if pivot is None:
            break
        pr, pc = pivot
        p = work[pr][pc]
        rows.remove(pr)
        cols.remove(pc)
        for i in rows:
            f = work[i][pc]
            for j in cols:
                work[i][j] = (p * work[i][j] - f * work[pr][j]).exact_div(prev)
            work[i][pc] = Poly()
        prev = p
        rank += 1
    return rank


def pivot_denominators(m: ExprMatrix) -> list[Expr]:
    """Pivot values found during elimination; the rank drops where one vanishes."""
    work = m.ratfuncs()
    return [from_ratfunc(work[r][c]) for r, c in _bareiss(work, m.cols)]


def _contains(r: RatFunc, unknowns: set) -> bool:
    for a in r.atoms():
        if a in unknowns:
            return True
        if isinstance(a, Func) and a.arg.free_symbols() & unknowns:
            return True
    return False


def solve_linear_system(equations: Sequence[Expr], unknowns: Sequence[Symbol]) -> dict:
    """Solve ``equations == 0`` for ``unknowns``; returns {unknown: Expr}.

    Raises NonlinearInUnknown, InconsistentSystem or UnderdeterminedSystem.
    """
    unknowns = list(unknowns)
    uset = set(unknowns)
    zero = {u: RatFunc.const(0) for u in unknowns}
    n = len(unknowns)
    aug: list[list[RatFunc]] = []
    for k, eq in enumerate(equations):
        r = to_ratfunc(eq)
        row = []
        for u in unknowns:
            c = diff_ratfunc(r, u)
            if _contains(c, uset):
                raise NonlinearInUnknown(k, u)
            row.append(c)
        row.append(-subst_ratfunc(r, zero))
        aug.append(row)
    if not aug:
        if unknowns:
            raise UnderdeterminedSystem(unknowns, [])
        return {}
    pivots = list(_bareiss(aug, n))
    used_rows = {r for r, _ in pivots}
    for i, row in enumerate(aug):
        if i not in used_rows and _nonzero(row[n]):
            raise InconsistentSystem(i)
    pivot_cols = {c for _, c in pivots}
    if len(pivots) < n:
        free = [u for j, u in enumerate(unknowns) if j not in pivot_cols]
        raise UnderdeterminedSystem(free, sorted(used_rows))
    # back substitution over the echelon rows, last pivot first
    solution: dict[int, RatFunc] = {}
    for r, c in reversed(pivots):
        acc = aug[r][n]
        for j in range(n):
            if j != c and j in solution:
                acc = acc - aug[r][j] * solution[j]
        solution[c] = acc / aug[r][c]
    return {unknowns[j]: from_ratfunc(v) for j, v in sorted(solution.items())}
