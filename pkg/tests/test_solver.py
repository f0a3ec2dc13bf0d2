"""Declarative model seam: lowering, both engines, verdict contract."""

import pytest
from hypothesis import given, settings, strategies as st

from qlayout import solver as sv
from qlayout.solver import (
    And,
    Eq,
    EqVar,
    Implies,
    Le,
    Lt,
    Model,
    ModelError,
    Ne,
    NeVar,
    Not,
    Or,
    SolverBackendError,
    Verdict,
    solve,
)


def test_int_var_domain_validation():
    m = Model()
    with pytest.raises(ModelError):
        m.int_var(3, 2)
    x = m.int_var(0, 4)
    with pytest.raises(ModelError):
        m.require(Eq(99, 1))
    with pytest.raises(ModelError):
        m.require_sum([(1, (x, 9))], "<=", 1)
    with pytest.raises(ModelError):
        m.require_sum([(1, x)], "!=", 1)


def test_empty_model_sat():
    v = solve(Model())
    assert v.status == sv.SAT
    assert v.assignment == {}


def test_single_eq():
    m = Model()
    x = m.int_var(2, 7)
    m.require(Eq(x, 5))
    v = solve(m)
    assert v.status == sv.SAT
    assert v.assignment[x] == 5


def test_contradiction_unsat():
    m = Model()
    x = m.int_var(0, 3)
    m.require(Eq(x, 1))
    m.require(Ne(x, 1))
    assert solve(m).status == sv.UNSAT


def test_connectives():
    m = Model()
    x = m.int_var(0, 2)
    y = m.int_var(0, 2)
    b = m.bool_var()
    m.require(Or(And(Eq(x, 0), Eq(y, 2)), Eq(b, 1)))
    m.require(Not(Eq(b, 1)))
    m.require(Implies(Eq(x, 0), Ne(y, 1)))
    v = solve(m)
    assert v.status == sv.SAT
    assert v.assignment[x] == 0 and v.assignment[y] == 2 and v.assignment[b] == 0


def test_var_comparisons():
    m = Model()
    x = m.int_var(0, 3)
    y = m.int_var(0, 3)
    m.require(Lt(x, y))
    m.require(EqVar(x, y)) if False else None
    m.minimize([(1, y)])
    v = solve(m)
    assert v.assignment == {x: 0, y: 1}

    m = Model()
    x = m.int_var(0, 3)
    y = m.int_var(0, 3)
    m.require(EqVar(x, y))
    m.require(Le(y, x))
    m.maximize([(1, x), (1, y)])
    v = solve(m)
    assert v.assignment == {x: 3, y: 3} and v.objective_value == 6

    m = Model()
    x = m.int_var(0, 1)
    y = m.int_var(0, 1)
    m.require(NeVar(x, y))
    m.require(Eq(x, 1))
    assert solve(m).assignment[y] == 0


def test_require_sum_forms():
    m = Model()
    x = m.int_var(0, 4)
    b = m.bool_var()
    # indicator form counts x == 3; bool handles count directly
    m.require_sum([(2, (x, 3)), (1, b)], "==", 3)
    v = solve(m)
    assert v.status == sv.SAT
    assert v.assignment[x] == 3 and v.assignment[b] == 1


def test_objective_exact_minimum():
    m = Model()
    xs = [m.int_var(0, 3) for _ in range(3)]
    for a, b in zip(xs, xs[1:]):
        m.require(Lt(a, b))
    m.minimize([(1, x) for x in xs])
    v = solve(m)
    assert v.objective_value == 0 + 1 + 2


def test_unsat_beats_objective():
    m = Model()
    x = m.int_var(0, 1)
    m.require(Eq(x, 0))
    m.require(Eq(x, 1))
    m.minimize([(1, x)])
    assert solve(m).status == sv.UNSAT


def _pigeons(n_pigeons: int, n_holes: int) -> Model:
    m = Model()
    ps = [m.int_var(0, n_holes - 1) for _ in range(n_pigeons)]
    for i in range(n_pigeons):
        for j in range(i + 1, n_pigeons):
            m.require(NeVar(ps[i], ps[j]))
    return m


def test_methods_agree_on_pigeonhole():
    assert solve(_pigeons(5, 4), method="sat").status == sv.UNSAT
    assert solve(_pigeons(5, 4), method="milp").status == sv.UNSAT
    assert solve(_pigeons(4, 4), method="sat").status == sv.SAT
    assert solve(_pigeons(4, 4), method="milp").status == sv.SAT


def test_sat_timeout_reported():
    # the sat core checks its deadline between conflict batches; a heavy
    # pigeonhole proof cannot finish within a millisecond
    v = solve(_pigeons(12, 11), timeout=0.001, method="sat")
    assert v.status == sv.TIMEOUT


def test_fractional_row_falls_back_to_milp():
    m = Model()
    b1 = m.bool_var()
    b2 = m.bool_var()
    m.require_sum([(0.5, b1), (0.5, b2)], ">=", 1)
    v = solve(m)  # auto: sat core refuses, milp answers
    assert v.status == sv.SAT
    assert v.assignment[b1] == 1 and v.assignment[b2] == 1
    with pytest.raises(SolverBackendError):
        solve(m, method="sat")


def test_unknown_method_rejected():
    with pytest.raises(ModelError):
        solve(Model(), method="magic")


def test_solve_is_deterministic():
    def build():
        m = Model()
        xs = [m.int_var(0, 4) for _ in range(5)]
        for a, b in zip(xs, xs[1:]):
            m.require(Or(Lt(a, b), Eq(a, 4)))
        m.require_sum([(1, x) for x in xs], "<=", 12)
        m.maximize([(1, x) for x in xs])
        return m
    va = solve(build())
    vb = solve(build())
    assert va.assignment == vb.assignment
    assert va.objective_value == vb.objective_value


# random-model agreement between the two engines

atoms = st.sampled_from(["eq", "ne", "lt", "le", "eqvar"])


@st.composite
def models(draw):
    m = Model()
    n_int = draw(st.integers(min_value=1, max_value=4))
    n_bool = draw(st.integers(min_value=0, max_value=2))
    handles = []
    for _ in range(n_int):
        lo = draw(st.integers(min_value=0, max_value=2))
        hi = lo + draw(st.integers(min_value=0, max_value=3))
        handles.append(m.int_var(lo, hi))
    for _ in range(n_bool):
        handles.append(m.bool_var())

    def atom():
        kind = draw(atoms)
        a = draw(st.sampled_from(handles))
        b = draw(st.sampled_from(handles))
        if kind == "eq":
            return Eq(a, draw(st.integers(min_value=m._var(a).lo, max_value=m._var(a).hi)))
        if kind == "ne":
            return Ne(a, draw(st.integers(min_value=m._var(a).lo, max_value=m._var(a).hi)))
        if kind == "lt":
            return Lt(a, b)
        if kind == "le":
            return Le(a, b)
        return EqVar(a, b)

    for _ in range(draw(st.integers(min_value=0, max_value=5))):
        k = draw(st.integers(min_value=1, max_value=3))
        m.require(Or(*[atom() for _ in range(k)]))
    if draw(st.booleans()):
        terms = [(draw(st.integers(min_value=-2, max_value=3)), h) for h in handles]
        m.require_sum(terms, draw(st.sampled_from(["<=", ">=", "=="])),
                      draw(st.integers(min_value=-2, max_value=8)))
    if draw(st.booleans()):
        terms = [(draw(st.integers(min_value=-2, max_value=3)), h) for h in handles]
        if draw(st.booleans()):
            m.minimize(terms)
        else:
            m.maximize(terms)
    return m


@settings(max_examples=60, deadline=None)
@given(models())
def test_engines_agree(m):
    va = solve(m, method="sat")
    vb = solve(m, method="milp")
    assert va.status == vb.status
    if va.status == sv.SAT:
        assert va.objective_value == vb.objective_value
        # both assignments must replay cleanly against the model
        assert m.check_assignment(va.assignment) == []
        assert m.check_assignment(vb.assignment) == []
