import itertools
import random

from hypothesis import strategies as st

from qbffpt.formula import EXISTS, FORALL, CnfMatrix, QbfInstance, QuantPrefix


@st.composite
def clauses(draw, n_vars, max_width):
    width = draw(st.integers(0, min(max_width, n_vars)))
    vs = draw(st.lists(st.integers(1, n_vars), min_size=width, max_size=width, unique=True))
    return tuple(v if draw(st.booleans()) else -v for v in vs)


@st.composite
def qbf_instances(draw, max_vars=6, max_width=3, max_clauses=6, allow_empty_clause=False):
    n = draw(st.integers(1, max_vars))
    quants = draw(st.lists(st.sampled_from((EXISTS, FORALL)), min_size=n, max_size=n))
    order = draw(st.permutations(range(1, n + 1)))
    cls = draw(st.lists(clauses(n, max_width), max_size=max_clauses))
    if not allow_empty_clause:
        cls = [c for c in cls if c]
    return QbfInstance(QuantPrefix(tuple(zip(quants, order))), CnfMatrix.from_clauses(cls))


def all_clauses(n, max_width, include_empty=True):
    out = [()] if include_empty else []
    for size in range(1, max_width + 1):
        for vs in itertools.combinations(range(1, n + 1), size):
            for signs in itertools.product((1, -1), repeat=size):
                out.append(tuple(v * s for v, s in zip(vs, signs)))
    return out


def seeded(seed):
    return random.Random(seed)
