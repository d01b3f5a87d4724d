import itertools

import pytest
from hypothesis import given, settings

from conftest import qbf_instances
from qbffpt.clause_graph import (
    ClauseGraph,
    build_cgis,
    extract_countermodel,
    falsifies_all,
    is_independent,
    pad_clause,
)
from qbffpt.expansion import TautInstance, expand_all
from qbffpt.formula import CnfMatrix
from qbffpt.search import cgis_brute_force, oracle_eval

PHI = [
    [(1, 2, 3), (-1, 2, 4), (-1, 5, -6), (-3, 2, 5)],
    [(2, -3, -6), (-4, -5, 6), (-2, 3, -6)],
    [(-2, 3, 4), (-2, -4, 5), (3, 4, -5)],
    [(1, -2, 5), (-3, 4, 6), (3, 4, -6), (-4, -5, 6)],
]


def worked_example_graph() -> tuple[TautInstance, ClauseGraph]:
    t = TautInstance(tuple(range(1, 7)), tuple(CnfMatrix.from_clauses(f) for f in PHI), d=3)
    return t, build_cgis(t)


def test_worked_example_adjacency_of_u1():
    _, g = worked_example_graph()
    g.validate()
    assert g.part_sizes() == [4, 3, 3, 4]
    assert sorted(g.neighbors(0, 0)) == [(1, 0), (1, 2), (2, 0), (2, 1), (3, 0), (3, 1)]


def test_worked_example_selection_and_countermodel():
    t, g = worked_example_graph()
    sel = (2, 2, 0, 2)
    assert is_independent(g, sel)
    alpha = extract_countermodel(g, sel)
    assert {v: alpha[v] for v in range(1, 7)} == {1: True, 2: True, 3: False, 4: False, 5: False, 6: True}
    assert falsifies_all(t, alpha)


def test_worked_example_brute_force_finds_a_selection():
    t, g = worked_example_graph()
    sel = cgis_brute_force(g)
    assert sel is not None and is_independent(g, sel)
    assert falsifies_all(t, extract_countermodel(g, sel))


def test_is_independent_rejects_bad_selection():
    _, g = worked_example_graph()
    assert not is_independent(g, (0, 0, 0, 0))
    with pytest.raises(IndexError):
        is_independent(g, (0, 0, 0))
    with pytest.raises(IndexError):
        is_independent(g, (9, 0, 0, 0))
    with pytest.raises(ValueError):
        extract_countermodel(g, (0, 0, 0, 0))


def test_pad_clause():
    assert pad_clause((-3,), 3, (7, 8)) == (-3, 7, 8)
    assert pad_clause((1, 2), 2, (7,)) == (1, 2)
    with pytest.raises(ValueError):
        pad_clause((1, 2, 3), 2, (7,))
    with pytest.raises(ValueError):
        pad_clause((), 3, (7, 8))


def test_padding_never_clashes():
    t = TautInstance((1, 2), (CnfMatrix.from_clauses([[1]]), CnfMatrix.from_clauses([[-1, 2]])), d=2)
    g = build_cgis(t)
    assert g.pads == (3,)
    assert g.parts == (((1, 3),), ((-1, 2),))
    assert not g.adjacent(0, 0, 0, 0)
    assert g.adjacent(0, 0, 1, 0)


def test_empty_clause_gets_full_padding():
    t = TautInstance((1,), (CnfMatrix.from_clauses([[]]), CnfMatrix.from_clauses([[1]])), d=1)
    g = build_cgis(t)
    assert len(g.pads) == 1 and g.parts[0] == ((g.pads[0],),)
    g.validate()


def brute_selection_exists(g: ClauseGraph) -> bool:
    return any(is_independent(g, s) for s in itertools.product(*(range(len(p)) for p in g.parts)))


@settings(max_examples=200, deadline=None)
@given(qbf_instances(max_vars=5, max_width=3, max_clauses=5, allow_empty_clause=True))
def test_selection_exists_iff_false(inst):
    for prune in (True, False):
        g = build_cgis(expand_all(inst, prune=prune))
        g.validate()
        if g.K == 0:
            assert not oracle_eval(inst)
            continue
        if sum(g.part_sizes()) > 40:
            continue
        assert brute_selection_exists(g) == (not oracle_eval(inst))
