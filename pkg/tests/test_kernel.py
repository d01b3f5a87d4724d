import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbffpt.clause_graph import ClauseGraph, is_independent
from qbffpt.forge import random_clause_graph
from qbffpt.kernel import (
    PAPER,
    SAFE,
    KernelReport,
    Sunflower,
    _check_sunflower,
    _reduce_labels,
    _search,
    find_sunflower,
    kernelize,
    reduce_part,
    size_bound,
    threshold,
)
from qbffpt.search import cgis_brute_force


def assert_sunflower(sf: Sunflower, family):
    sets = [frozenset(f) for f in family]
    members = [sets[i] for i in sf.members]
    assert len(set(sf.members)) == len(sf.members) >= 2
    for A, B in itertools.combinations(members, 2):
        assert A & B == sf.core


def test_disjoint_family_has_empty_core():
    fam = [(1, 2), (3, 4), (5, 6)]
    sf = find_sunflower(fam, 3)
    assert sf.core == frozenset() and sf.members == (0, 1, 2)
    assert sf.petal(fam[0]) == {1, 2}


def test_star():
    sf = find_sunflower([(1, 2), (1, 3), (1, 4)], 3)
    assert sf.core == {1} and len(sf) == 3


def test_find_sunflower_errors():
    with pytest.raises(ValueError):
        find_sunflower([(1, 2), (3,)], 2)
    with pytest.raises(ValueError):
        find_sunflower([(1, 2)], 1)
    assert find_sunflower([], 2) is None
    assert find_sunflower([(1, 2), (2, 3), (1, 3)], 3) is None


def test_check_sunflower_rejects_overlapping_petals():
    sets = [frozenset({1, 2}), frozenset({1, 3}), frozenset({2, 3})]
    with pytest.raises(AssertionError):
        _check_sunflower(Sunflower(frozenset(), (0, 1)), sets)
    with pytest.raises(AssertionError):
        _check_sunflower(Sunflower(frozenset({1}), (0, 2)), sets)


def test_thresholds_and_bounds():
    assert threshold(2, 2, PAPER) == 4 and size_bound(2, 4) - 1 == 17
    assert threshold(2, 2, SAFE) == 6 and size_bound(2, 6) - 1 == 49
    assert threshold(1, 3, PAPER) == 2
    with pytest.raises(ValueError):
        threshold(2, 2, "bogus")


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3), st.integers(2, 4), st.integers(0, 2**32))
def test_guarantee_above_threshold(b, a, seed):
    rng = random.Random(seed)
    universe = range(1, 9)
    pool = [frozenset(c) for c in itertools.combinations(universe, b)]
    need = size_bound(b, a) + 1
    if need > len(pool):
        return
    fam = rng.sample(pool, need)
    sf = find_sunflower(fam, a)
    assert sf is not None and len(sf) >= a
    assert_sunflower(sf, fam)


def naive_reduce(labels, s):
    """Insert from the highest index down, rerunning the full search each time."""
    sets = [frozenset(c) for c in labels]
    b = len(sets[0]) if sets else 0
    kept = []
    for new in range(len(sets) - 1, -1, -1):
        kept.append(new)
        found = _search(kept, [sets[i] for i in kept], s, b)
        if found is not None:
            assert new in found[1]
            kept.pop()
    return sorted(kept)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 3), st.integers(2, 6), st.integers(0, 60), st.integers(0, 2**32))
def test_incremental_reduction_matches_full_search(d, s, size, seed):
    g = random_clause_graph(random.Random(seed), 1, d, size, 7)
    labels = g.parts[0]
    kept, n_sf, n_del = _reduce_labels(labels, s)
    assert kept == naive_reduce(labels, s)
    assert n_del == len(labels) - len(kept)
    # searched in insertion order, the survivors hold no sunflower of size s
    order = kept[::-1]
    assert _search(order, [frozenset(labels[i]) for i in order], s, d) is None


def test_reduce_part_examples():
    g = ClauseGraph((1, 2, 3, 4, 5, 6), (((1,), (2,), (3,), (4,)),), 1)
    out = reduce_part(g, 0, 2)
    assert len(out.parts[0]) == 1 and cgis_brute_force(out) is not None
    small = ClauseGraph((1, 2), (((1,), (2,)),), 1)
    assert reduce_part(small, 0, 3) == small
    with pytest.raises(IndexError):
        reduce_part(g, 1, 2)
    with pytest.raises(ValueError):
        reduce_part(g, 0, 1)


def test_kernelize_report_and_untouched_graph():
    g = ClauseGraph((1, 2, 3), (((1, 2),), ((-1, 3),)), 2)
    out, report = kernelize(g, PAPER)
    assert out == g
    assert isinstance(report, KernelReport)
    assert report.s == 4 and report.bound == 18 and report.certified
    kv = report.kv()
    assert kv["kernel_deleted"] == 0 and kv["kernel_mode"] == "paper (per-paper)"


def test_kernelize_parallel_matches_serial():
    rng = random.Random(7)
    g = random_clause_graph(rng, 4, 2, 40, 6)
    assert kernelize(g, SAFE, jobs=2) == kernelize(g, SAFE, jobs=1)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 2**32), st.sampled_from((PAPER, SAFE)))
def test_kernel_preserves_answer(K, d, seed, mode):
    g = random_clause_graph(random.Random(seed), K, d, 30, 6)
    out, report = kernelize(g, mode)
    assert (cgis_brute_force(g) is None) == (cgis_brute_force(out) is None)
    for before, after in zip(g.parts, out.parts):
        assert set(after) <= set(before)
    assert report.after == out.part_sizes()


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 3), st.integers(1, 2), st.integers(0, 2**32))
def test_exchange_argument_on_single_deletions(K, d, seed):
    """Deleting a sunflower member never destroys every solution."""
    rng = random.Random(seed)
    g = random_clause_graph(rng, K, d, 14, 5)
    s = threshold(K, d, PAPER)
    for i, part in enumerate(g.parts):
        if not part:
            continue
        sf = find_sunflower(part, s)
        if sf is None:
            continue
        victim = sf.members[0]
        sols = [sel for sel in itertools.product(*(range(len(p)) for p in g.parts)) if is_independent(g, sel)]
        if sols and all(sel[i] == victim for sel in sols):
            parts = list(g.parts)
            parts[i] = tuple(c for j, c in enumerate(part) if j != victim)
            assert cgis_brute_force(g.with_parts(parts)) is not None
