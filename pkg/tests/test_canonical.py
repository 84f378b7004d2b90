import pytest

from _support import pipeline
from hjq.canonical import (
    ResidualVelocity,
    VelocitySolveFailure,
    build_hjpde_set,
    canonical_hamiltonian,
    conjugate_momenta,
    hessian,
    make_model,
    solve_velocities,
)
from hjq.models import NAMES, builtin
from hjq.symcore import Num, differentiate, parse_expr, same, substitute


def ex(model, text):
    return parse_expr(text, model.table)


def matrix_text(report):
    return [[str(x) for x in row] for row in report.matrix.entries]


def test_oscillator_hessian_is_identity():
    r = hessian(builtin("oscillator2d").model)
    assert matrix_text(r) == [["1", "0"], ["0", "1"]]
    assert (r.rank, r.expressible, r.unexpressible) == (2, (0, 1), ())


def test_shifted_velocity_hessian():
    r = hessian(builtin("shifted_velocity").model)
    assert matrix_text(r) == [["1", "0"], ["0", "0"]]
    assert (r.rank, r.expressible, r.unexpressible) == (1, (0,), (1,))


def test_frw_hessian():
    m = builtin("frw_lambda").model
    r = hessian(m)
    assert matrix_text(r)[0] == ["0", "0"]
    assert same(r.matrix[1, 1], ex(m, "-6*a/N"))
    assert (r.rank, r.unexpressible) == (1, (0,))
    # the degenerate locus shows up as a pivot
    assert [str(p) for p in r.pivots] == ["-6*a/N"]


def test_off_diagonal_kinetic_term_uses_subset_search():
    m = make_model("cross", ["x", "y"], [], "dx*dy")
    r = hessian(m)
    assert r.rank == 2 and r.expressible == (0, 1)
    cs = build_hjpde_set(m)
    assert same(cs.h0, ex(m, "p_x*p_y"))


def test_conjugate_momenta():
    osc = builtin("oscillator2d").model
    mom = conjugate_momenta(osc)
    assert [str(v) for v in mom.values()] == ["dx", "dy"]
    frw = builtin("frw_lambda").model
    mom = conjugate_momenta(frw)
    N, a = frw.coordinates
    assert mom[N] == Num(0)
    assert same(mom[a], ex(frw, "-6*a*da/N"))
    sv = builtin("shifted_velocity").model
    mom = conjugate_momenta(sv)
    assert same(mom[sv.coordinates[0]], ex(sv, "dx - y"))
    assert mom[sv.coordinates[1]] == Num(0)


@pytest.mark.parametrize("name, expected", [
    ("oscillator2d", {"dx": "p_x", "dy": "p_y"}),
    ("frw_lambda", {"da": "-N*p_a/(6*a)"}),
    ("shifted_velocity", {"dx": "p_x + y"}),
])
def test_solved_velocities(name, expected):
    cs, _ = pipeline(name)
    got = {v.name: w for v, w in cs.solved_velocities.items()}
    assert set(got) == set(expected)
    for k, text in expected.items():
        assert same(got[k], ex(cs.model, text))


@pytest.mark.parametrize("name, text", [
    ("oscillator2d", "1/2*(p_x^2 + p_y^2) + 1/2*(x^2 + y^2)"),
    ("frw_lambda", "N*(-p_a^2/(12*a) + Lambda*a^3)"),
    ("frw", "-N*p_a^2/(12*a)"),
    ("shifted_velocity", "1/2*p_x^2 + y*p_x"),
    ("coupled_parameter", "1/2*p_x^2"),
])
def test_canonical_hamiltonian(name, text):
    cs, _ = pipeline(name)
    assert same(cs.h0, ex(cs.model, text))


@pytest.mark.parametrize("name, coord, text", [
    ("frw_lambda", "N", "0"),
    ("shifted_velocity", "y", "0"),
    ("coupled_parameter", "y", "-x"),
])
def test_h_mu(name, coord, text):
    cs, _ = pipeline(name)
    q = cs.model.table[coord]
    assert same(cs.h_mu[q], ex(cs.model, text))


def test_generators():
    cs, _ = pipeline("oscillator2d")
    assert [t.name for t in cs.generators()] == ["tau"]
    cs, _ = pipeline("frw_lambda")
    gens = {cs.label(t): g for t, g in cs.generators().items()}
    assert same(gens["H'_0"], ex(cs.model, "p_0 + N*(-p_a^2/(12*a) + Lambda*a^3)"))
    assert same(gens["H'_N"], ex(cs.model, "p_N"))
    cs, _ = pipeline("shifted_velocity")
    gens = {cs.label(t): g for t, g in cs.generators().items()}
    assert same(gens["H'_0"], ex(cs.model, "p_0 + 1/2*p_x^2 + y*p_x"))
    assert same(gens["H'_y"], ex(cs.model, "p_y"))
    assert [t.name for t in cs.parameter_times] == ["tau", "y"]
    assert [p.name for p in cs.parameter_momenta] == ["p_0", "p_y"]


def test_relativistic_particle_is_rejected():
    m = make_model("rel", ["x"], ["m"], "-m*sqrt(1 - dx^2)")
    with pytest.raises(VelocitySolveFailure) as info:
        build_hjpde_set(m)
    assert info.value.coordinate == "x" and info.value.index == 0


def test_residual_velocity_is_detected():
    # forcing a bogus partition leaves dy behind in H_0
    m = make_model("reg", ["x", "y"], [], "1/2*dx^2 + 1/2*dy^2")
    r = hessian(m)
    bogus = type(r)(r.matrix, 1, (0,), (1,), ())
    rel = conjugate_momenta(m)
    solved = solve_velocities(m, bogus, rel)
    with pytest.raises(ResidualVelocity):
        canonical_hamiltonian(m, bogus, rel, solved)


@pytest.mark.parametrize("name", NAMES)
def test_structural_invariants(name):
    cs, _ = pipeline(name)
    m = cs.model
    h = cs.hessian.matrix
    for i in range(m.n):
        for j in range(m.n):
            assert same(h[i, j], h[j, i])
    assert len(cs.hessian.expressible) + len(cs.hessian.unexpressible) == m.n
    for v in m.velocities:
        assert differentiate(cs.h0, v) == Num(0)
    assert not (cs.h0.free_symbols() & set(cs.parameter_momenta))
    for q in cs.expressible_coordinates:
        residual = substitute(cs.momenta[q] - cs.momentum_relations[q], cs.solved_velocities)
        assert residual == Num(0)
    again = hessian(m)
    assert again.expressible == cs.hessian.expressible


@pytest.mark.parametrize("name", [n for n in NAMES if pipeline(n)[0].hessian.rank == builtin(n).model.n])
def test_legendre_consistency_for_regular_models(name):
    cs, _ = pipeline(name)
    m = cs.model
    total = -cs.h0
    for q in m.coordinates:
        total = total + cs.momenta[q] * differentiate(cs.h0, cs.momenta[q])
    back = substitute(total, {cs.momenta[q]: cs.momentum_relations[q] for q in m.coordinates})
    assert same(back, m.lagrangian)
