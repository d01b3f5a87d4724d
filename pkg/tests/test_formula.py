import pytest
from hypothesis import given

from conftest import qbf_instances
from qbffpt.formula import (
    EXISTS,
    FORALL,
    CnfMatrix,
    FormulaError,
    QbfInstance,
    QuantPrefix,
    assign,
    clash,
    evaluate,
    make_clause,
)


def test_make_clause_canonical_order():
    assert make_clause([3, -1, 2]) == (-1, 2, 3)
    assert make_clause([]) == ()


@pytest.mark.parametrize("lits", [[0], [1, 1], [2, -2], ["x"]])
def test_make_clause_rejects(lits):
    with pytest.raises(FormulaError):
        make_clause(lits)


def test_clash():
    assert clash((1, 2), (-2, 3))
    assert not clash((1, 2), (2, 3))
    assert not clash((), (1,))


def test_matrix_constants():
    assert CnfMatrix().is_true
    m = CnfMatrix.from_clauses([[1], []])
    assert m.is_false and m.has_empty_clause and m.width == 1


def test_from_clauses_dedups_after_canonicalizing():
    m = CnfMatrix.from_clauses([[2, 1], [1, 2], [3]])
    assert m.clauses == ((1, 2), (3,))
    m.validate()
    with pytest.raises(FormulaError):
        CnfMatrix(((1, 2), (1, 2))).validate()


def test_assign_simplifies_and_merges():
    m = CnfMatrix.from_clauses([[1, 2], [-1, 2], [3]])
    assert assign(m, 1, True).clauses == ((2,), (3,))
    assert assign(m, 3, False).is_false


def test_evaluate_requires_total_assignment():
    m = CnfMatrix.from_clauses([[1, -2]])
    assert evaluate(m, {1: False, 2: False})
    assert not evaluate(m, {1: False, 2: True})
    with pytest.raises(FormulaError):
        evaluate(m, {1: True})


def test_prefix_validation_and_blocks():
    p = QuantPrefix.of((FORALL, [1, 2]), (EXISTS, [3]), (FORALL, [4]))
    assert p.existentials() == [3]
    assert p.universals() == [1, 2, 4]
    assert p.blocks() == [(FORALL, [1, 2]), (EXISTS, [3]), (FORALL, [4])]
    with pytest.raises(FormulaError):
        QuantPrefix(((EXISTS, 1), (FORALL, 1)))
    with pytest.raises(FormulaError):
        QuantPrefix((("x", 1),))
    with pytest.raises(FormulaError):
        QuantPrefix(((EXISTS, 0),))


def test_instance_rejects_free_variables():
    with pytest.raises(FormulaError):
        QbfInstance.build([(EXISTS, [1])], [[1, 2]])
    inst = QbfInstance.build([(FORALL, [1, 2]), (EXISTS, [5])], [[1, -5], [2, 5, -1]])
    assert (inst.n, inst.k, inst.d, inst.max_var()) == (3, 1, 3, 5)


@given(qbf_instances())
def test_assign_agrees_with_evaluate(inst):
    vs = sorted(inst.matrix.variables())
    if not vs:
        return
    v = vs[0]
    for b in (False, True):
        reduced = assign(inst.matrix, v, b)
        rest = {u: (u % 2 == 0) for u in vs}
        rest[v] = b
        sub = {u: rest[u] for u in reduced.variables()}
        assert evaluate(reduced, sub) == evaluate(inst.matrix, rest)
