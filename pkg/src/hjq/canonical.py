"""Canonical analysis of a (possibly singular) Lagrangian.

Builds the Hessian in the velocities, splits coordinates into those whose
velocities can be solved for ("expressible") and those that cannot, and
assembles the canonical Hamiltonian H_0 together with the family of
Hamilton-Jacobi generators ``H'_alpha = p_alpha + H_alpha``.  The
unexpressible coordinates become parameter times alongside ``tau``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from hjq.symcore import (
    Expr,
    ExprMatrix,
    NonlinearInUnknown,
    Symbol,
    SymbolTable,
    UnderdeterminedSystem,
    canonical_form,
    differentiate,
    matrix_rank,
    momentum_name,
    parse_expr,
    pivot_denominators,
    solve_linear_system,
    substitute,
    velocity_name,
)

TAU = "tau"
P_TAU = "p_0"


class AnalysisError(Exception):
    pass


class VelocitySolveFailure(AnalysisError):
    def __init__(self, index: int, coordinate: str, reason: str):
        super().__init__(f"cannot solve for velocity of {coordinate} (index {index}): {reason}")
        self.index = index
        self.coordinate = coordinate


class ResidualVelocity(AnalysisError):
    def __init__(self, what: str, velocities):
        names = ", ".join(sorted(v.name for v in velocities))
        super().__init__(f"{what} still depends on velocities {names}; inconsistent partition")
        self.velocities = velocities


@dataclass(frozen=True)
class ModelDefinition:
    name: str
    coordinates: tuple[Symbol, ...]
    constants: tuple[Symbol, ...]
    lagrangian: Expr
    table: SymbolTable = field(repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.coordinates)

    def velocity(self, q: Symbol) -> Symbol:
        return self.table[velocity_name(q.name)]

    def momentum(self, q: Symbol) -> Symbol:
        return self.table[momentum_name(q.name)]

    @property
    def velocities(self) -> tuple[Symbol, ...]:
        return tuple(self.velocity(q) for q in self.coordinates)

    @property
    def tau(self) -> Symbol:
        return self.table[TAU]

    @property
    def p_tau(self) -> Symbol:
        return self.table[P_TAU]


def build_table(coordinates, constants) -> SymbolTable:
    """Symbols in creation order: coordinates, velocities, momenta, constants, tau, p_0."""
    table = SymbolTable()
    for q in coordinates:
        table.add(q, "coordinate")
    for q in coordinates:
        table.add(velocity_name(q), "velocity", partner=q)
    for q in coordinates:
        table.add(momentum_name(q), "momentum", partner=q)
    for c in constants:
        table.add(c, "constant")
    table.add(TAU, "parameter-time")
    table.add(P_TAU, "momentum", partner=TAU)
    return table.freeze()


def make_model(name: str, coordinates, constants, lagrangian) -> ModelDefinition:
    """Build a model from names and a Lagrangian (text or Expr)."""
    coordinates = list(coordinates)
    constants = list(constants)
    if not coordinates:
        raise ValueError("a model needs at least one coordinate")
    table = build_table(coordinates, constants)
    if isinstance(lagrangian, str):
        visible = {k: s for k, s in table.items() if s.kind in ("coordinate", "velocity", "constant")}
        lagrangian = parse_expr(lagrangian, visible)
    return ModelDefinition(
        name=name,
        coordinates=tuple(table[q] for q in coordinates),
        constants=tuple(table[c] for c in constants),
        lagrangian=lagrangian,
        table=table,
    )


@dataclass(frozen=True)
class HessianReport:
    matrix: ExprMatrix
    rank: int
    expressible: tuple[int, ...]
    unexpressible: tuple[int, ...]
    # pivots of the expressible block; the generic rank fails where one vanishes
    pivots: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class CanonicalSystem:
    model: ModelDefinition
    hessian: HessianReport
    momentum_relations: dict  # coordinate -> dL/d(velocity)
    solved_velocities: dict  # velocity -> W
    momenta: dict  # coordinate -> momentum symbol
    h0: Expr
    h_mu: dict  # unexpressible coordinate -> H_mu
    parameter_times: tuple[Symbol, ...]
    parameter_momenta: tuple[Symbol, ...]

    @property
    def expressible_coordinates(self) -> tuple[Symbol, ...]:
        return tuple(self.model.coordinates[i] for i in self.hessian.expressible)

    @property
    def unexpressible_coordinates(self) -> tuple[Symbol, ...]:
        return tuple(self.model.coordinates[i] for i in self.hessian.unexpressible)

    def expressible_pairs(self) -> list[tuple[Symbol, Symbol]]:
        return [(q, self.momenta[q]) for q in self.expressible_coordinates]

    def canonical_pairs(self) -> list[tuple[Symbol, Symbol]]:
        """All conjugate pairs, including (tau, p_0) and (q_mu, p_mu)."""
        pairs = [(q, self.momenta[q]) for q in self.model.coordinates]
        pairs.append((self.model.tau, self.model.p_tau))
        return pairs

    def h_alpha(self, t: Symbol) -> Expr:
        return self.h0 if t == self.model.tau else self.h_mu[t]

    def generators(self) -> dict:
        """{parameter time: H'_alpha} in parameter order."""
        return {
            t: canonical_form(p + self.h_alpha(t))
            for t, p in zip(self.parameter_times, self.parameter_momenta)
        }

    def label(self, t: Symbol) -> str:
        return "H'_0" if t == self.model.tau else f"H'_{t.name}"


def _free_velocities(e: Expr, model: ModelDefinition) -> set:
    return {s for s in e.free_symbols() if s.kind == "velocity"}


def conjugate_momenta(model: ModelDefinition) -> dict:
    return {q: differentiate(model.lagrangian, model.velocity(q)) for q in model.coordinates}


def hessian(model: ModelDefinition) -> HessianReport:
    vel = model.velocities
    first = [differentiate(model.lagrangian, v) for v in vel]
    m = ExprMatrix([[differentiate(f, w) for w in vel] for f in first])
    rank = matrix_rank(m)
    n = model.n
    expressible: tuple[int, ...] = ()
    # lexicographically first index set with a nonsingular principal block;
    # a symmetric matrix of rank r always has one
    for subset in combinations(range(n), rank):
        if rank == 0 or matrix_rank(m.submatrix(subset, subset)) == rank:
            expressible = subset
            break
    unexpressible = tuple(i for i in range(n) if i not in expressible)
    pivots: tuple[Expr, ...] = ()
    if expressible:
        pivots = tuple(pivot_denominators(m.submatrix(expressible, expressible)))
    return HessianReport(m, rank, expressible, unexpressible, pivots)


def solve_velocities(model: ModelDefinition, report: HessianReport, relations: dict) -> dict:
    """W_a for each expressible velocity, from p_a = dL/d(velocity_a)."""
    coords = [model.coordinates[i] for i in report.expressible]
    unknowns = [model.velocity(q) for q in coords]
    equations = [model.momentum(q) - relations[q] for q in coords]
    try:
        solution = solve_linear_system(equations, unknowns)
    except NonlinearInUnknown as err:
        i = report.expressible[err.equation]
        raise VelocitySolveFailure(i, model.coordinates[i].name,
                                   f"momentum relation is nonlinear in {err.unknown.name}") from err
    except UnderdeterminedSystem as err:
        v = err.free[0]
        i = model.velocities.index(v)
        raise VelocitySolveFailure(i, model.coordinates[i].name, "velocity block is singular") from err
    return {v: solution[v] for v in unknowns}


def canonical_hamiltonian(model: ModelDefinition, report: HessianReport, relations: dict,
                          solved: dict) -> Expr:
    """H_0 = sum_a p_a W_a + sum_mu p_mu dq_mu - L, with p_mu = -H_mu and dq_a = W_a.

    Unexpressible velocities must cancel; a survivor raises ResidualVelocity.
    """
    total = -model.lagrangian
    for i in report.expressible:
        q = model.coordinates[i]
        total = total + model.momentum(q) * model.velocity(q)
    for i in report.unexpressible:
        q = model.coordinates[i]
        total = total + relations[q] * model.velocity(q)
    h0 = substitute(total, solved)
    left = _free_velocities(h0, model)
    if left:
        raise ResidualVelocity("H_0", left)
    return h0


def h_mu_family(model: ModelDefinition, report: HessianReport, relations: dict,
                solved: dict) -> dict:
    out = {}
    for i in report.unexpressible:
        q = model.coordinates[i]
        h = substitute(-relations[q], solved)
        left = _free_velocities(h, model)
        if left:
            raise ResidualVelocity(f"H_{q.name}", left)
        out[q] = h
    return out


def build_hjpde_set(model: ModelDefinition) -> CanonicalSystem:
    report = hessian(model)
    relations = conjugate_momenta(model)
    solved = solve_velocities(model, report, relations)
    h0 = canonical_hamiltonian(model, report, relations, solved)
    h_mu = h_mu_family(model, report, relations, solved)
    unexp = [model.coordinates[i] for i in report.unexpressible]
    return CanonicalSystem(
        model=model,
        hessian=report,
        momentum_relations=relations,
        solved_velocities=solved,
        momenta={q: model.momentum(q) for q in model.coordinates},
        h0=h0,
        h_mu=h_mu,
        parameter_times=(model.tau, *unexp),
        parameter_momenta=(model.p_tau, *(model.momentum(q) for q in unexp)),
    )
