import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import qbf_instances
from qbffpt.clause_graph import ClauseGraph, is_independent
from qbffpt.forge import random_clause_graph, random_qdcnf
from qbffpt.formula import EXISTS, FORALL, QbfInstance
from qbffpt.search import (
    Budget,
    BudgetExceeded,
    Countermodel,
    check_countermodel,
    cgis_brute_force,
    oracle_eval,
    solve,
)


def test_oracle_examples():
    assert oracle_eval(QbfInstance.build([(FORALL, [1]), (EXISTS, [2])], [[1, 2], [-1, -2]]))
    assert not oracle_eval(QbfInstance.build([(EXISTS, [1]), (FORALL, [2])], [[1, 2], [-1, -2]]))
    assert oracle_eval(QbfInstance.build([], []))
    assert not oracle_eval(QbfInstance.build([], [[]]))


def test_solve_static_witness():
    inst = QbfInstance.build([(FORALL, [1, 2]), (EXISTS, [3])], [[1, 3], [2, -3]])
    v = solve(inst, method="fpt")
    assert not v.answer
    assert v.witness.as_assignment() == {1: False, 2: False}
    assert check_countermodel(inst, v.witness)


def test_solve_strategy_witness():
    inst = QbfInstance.build([(EXISTS, [1]), (FORALL, [2])], [[1, 2], [-1, -2]])
    v = solve(inst, method="xp")
    assert not v.answer and v.witness.as_assignment() is None
    assert v.witness.universal_values({1: False}) == {2: False}
    assert v.witness.universal_values({1: True}) == {2: True}
    assert check_countermodel(inst, v.witness)


def test_wrong_countermodel_is_rejected():
    inst = QbfInstance.build([(FORALL, [1]), (EXISTS, [2])], [[1, 2]])
    assert not check_countermodel(inst, Countermodel((2,), {1: ()}, {1: {"": True}}))


def test_true_instance_has_no_witness():
    v = solve(QbfInstance.build([(FORALL, [1]), (EXISTS, [2])], [[1, 2], [-1, -2]]), method="fpt")
    assert v.answer and v.witness is None


def test_auto_method_threshold():
    small = random_qdcnf(5, 2, 3, 6, seed=1)
    assert solve(small).method == "oracle"
    big = random_qdcnf(30, 2, 3, 20, seed=1)
    assert solve(big).method == "fpt"


def test_budgets():
    inst = random_qdcnf(10, 3, 3, 12, seed=3)
    with pytest.raises(BudgetExceeded) as e:
        solve(inst, method="fpt", budget=Budget(max_parts=4))
    assert e.value.which == "parts"
    with pytest.raises(BudgetExceeded) as e:
        solve(inst, method="fpt", budget=Budget(max_clauses=1))
    assert e.value.which == "clauses"
    with pytest.raises(ValueError):
        Budget(max_parts=0)
    with pytest.raises(ValueError):
        solve(inst, method="magic")


def test_brute_force_edge_cases():
    assert cgis_brute_force(ClauseGraph((), (), 1)) == ()
    assert cgis_brute_force(ClauseGraph((1,), (((1,),), ()), 1)) is None
    assert cgis_brute_force(ClauseGraph((1,), (((1,),), ((-1,),)), 1)) is None


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 2**32))
def test_brute_force_returns_lexicographically_least(K, d, seed):
    g = random_clause_graph(random.Random(seed), K, d, 6, 5)
    order = sorted(range(K), key=lambda i: (len(g.parts[i]), i))
    best = None
    for combo in itertools.product(*(range(len(g.parts[i])) for i in order)):
        sel = [0] * K
        for i, v in zip(order, combo):
            sel[i] = v
        if is_independent(g, sel):
            best = tuple(sel)
            break
    assert cgis_brute_force(g) == best


@settings(max_examples=300, deadline=None)
@given(qbf_instances(max_vars=7, max_width=3, max_clauses=7, allow_empty_clause=True), st.booleans())
def test_methods_agree_and_witnesses_check(inst, prune):
    truth = oracle_eval(inst)
    for method in ("fpt", "xp"):
        v = solve(inst, method=method, prune=prune)
        assert v.answer == truth
        if not truth:
            assert v.witness is not None and check_countermodel(inst, v.witness)
