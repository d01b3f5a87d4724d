"""Instance generators: random QBFs, clause graphs, QCSPs and the hardness reduction."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import ceil, comb, log2
from typing import Hashable, Iterable, Sequence

from .clause_graph import ClauseGraph
from .formula import EXISTS, FORALL, Clause, CnfMatrix, QbfInstance, QuantPrefix, lit_key
from .qcsp import Constraint, QcspInstance, QcspVariable

PREFIX_SHAPES = ("alternating", "ae", "ea", "random")


@dataclass(frozen=True)
class MultipartiteGraph:
    parts: tuple[tuple[Hashable, ...], ...]
    edges: frozenset[frozenset]

    def __post_init__(self) -> None:
        where: dict[Hashable, int] = {}
        for i, part in enumerate(self.parts):
            for v in part:
                if v in where:
                    raise ValueError(f"vertex {v!r} appears twice")
                where[v] = i
        for e in self.edges:
            if len(e) != 2:
                raise ValueError(f"edge {set(e)} is not a pair")
            u, v = tuple(e)
            if u not in where or v not in where:
                raise ValueError(f"edge {set(e)} uses an unknown vertex")
            if where[u] == where[v]:
                raise ValueError(f"edge {set(e)} lies inside part {where[u]}")

    @classmethod
    def build(cls, parts: Iterable[Iterable[Hashable]], edges: Iterable[tuple[Hashable, Hashable]]):
        return cls(tuple(tuple(p) for p in parts), frozenset(frozenset(e) for e in edges))

    @property
    def K(self) -> int:
        return len(self.parts)

    def vertices(self) -> list[Hashable]:
        return [v for p in self.parts for v in p]

    def adjacent(self, u: Hashable, v: Hashable) -> bool:
        return frozenset((u, v)) in self.edges


def is_to_multipartite(
    vertices: Sequence[Hashable], edges: Iterable[tuple[Hashable, Hashable]], k: int, strict: bool = True
) -> MultipartiteGraph:
    """K copies of the vertex set, one per part, with cross-part edges.

    ``(i, u)`` and ``(i', v)`` are joined for ``i != i'`` when ``uv`` is an
    edge.  In strict mode copies of the same vertex are joined as well, so a
    one-per-part independent set is exactly an independent set of size ``k``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    adj = {frozenset(e) for e in edges if len(set(e)) == 2}
    parts = [[(i, v) for v in vertices] for i in range(1, k + 1)]
    out = set()
    for i, j in itertools.combinations(range(1, k + 1), 2):
        for u in vertices:
            for v in vertices:
                if (u == v and strict) or (u != v and frozenset((u, v)) in adj):
                    out.add(frozenset(((i, u), (j, v))))
    return MultipartiteGraph(tuple(tuple(p) for p in parts), frozenset(out))


def has_multipartite_is(g: MultipartiteGraph) -> bool:
    """Brute force over all one-per-part choices."""
    for choice in itertools.product(*g.parts):
        if not any(g.adjacent(u, v) for u, v in itertools.combinations(choice, 2)):
            return True
    return False


def alpha_literals(part_index: int, kappa: int, xs: Sequence[int]) -> list[int]:
    """Literals over ``xs`` falsified exactly by the binary code of ``part_index``."""
    lits = []
    for ell in range(kappa):
        bit = (part_index >> (kappa - 1 - ell)) & 1
        lits.append(-xs[ell] if bit else xs[ell])
    return lits


def multipartite_is_to_qbf(g: MultipartiteGraph) -> QbfInstance:
    """A forall-exists CNF that is false iff ``g`` has a one-per-part independent set.

    Universal ``y_v`` per vertex (numbered in part order, padding vertices
    last), then ``ceil(log2 K)`` existentials.
    """
    if g.K < 1:
        raise ValueError("graph needs at least one part")
    kappa = ceil(log2(g.K)) if g.K > 1 else 0
    parts: list[list[Hashable]] = [list(p) for p in g.parts]
    for extra in range(2**kappa - g.K):
        parts.append([("pad", extra)])
    y: dict[Hashable, int] = {}
    for part in parts:
        for v in part:
            y[v] = len(y) + 1
    xs = list(range(len(y) + 1, len(y) + kappa + 1))
    neighbours: dict[Hashable, list[Hashable]] = {v: [] for v in y}
    for e in g.edges:
        u, v = tuple(e)
        neighbours[u].append(v)
        neighbours[v].append(u)
    clauses = []
    for i, part in enumerate(parts):
        pattern = alpha_literals(i, kappa, xs)
        for v in part:
            lits = [y[v]] + [-y[u] for u in neighbours[v]] + pattern
            clauses.append(lits)
    return QbfInstance(
        QuantPrefix(tuple([(FORALL, v) for v in y.values()] + [(EXISTS, x) for x in xs])),
        CnfMatrix.from_clauses(clauses),
    )


def random_multipartite_graph(rng: random.Random, n_vertices: int, K: int, p: float = 0.4) -> MultipartiteGraph:
    """Vertices dealt at random into ``K`` parts (possibly empty), edges with probability ``p``."""
    where = [rng.randrange(K) for _ in range(n_vertices)]
    parts = [[f"v{v}" for v in range(n_vertices) if where[v] == i] for i in range(K)]
    edges = [
        (f"v{u}", f"v{v}")
        for u, v in itertools.combinations(range(n_vertices), 2)
        if where[u] != where[v] and rng.random() < p
    ]
    return MultipartiteGraph.build(parts, edges)


def _prefix_order(n_universal: int, k_existential: int, shape: str, rng: random.Random) -> list[str]:
    n = n_universal + k_existential
    if shape == "ae":
        return [FORALL] * n_universal + [EXISTS] * k_existential
    if shape == "ea":
        return [EXISTS] * k_existential + [FORALL] * n_universal
    if shape == "alternating":
        quants = [FORALL] * n
        for j in range(k_existential):
            quants[min(n - 1, (j + 1) * n // (k_existential + 1))] = EXISTS
        # collisions only when n is tiny; fill from the back
        missing = k_existential - quants.count(EXISTS)
        for pos in range(n - 1, -1, -1):
            if missing <= 0:
                break
            if quants[pos] == FORALL:
                quants[pos] = EXISTS
                missing -= 1
        return quants
    if shape == "random":
        ex = set(rng.sample(range(n), k_existential))
        return [EXISTS if i in ex else FORALL for i in range(n)]
    raise ValueError(f"unknown prefix shape {shape!r}")


def distinct_clause_count(n_vars: int, d: int) -> int:
    return sum(comb(n_vars, s) * 2**s for s in range(1, min(d, n_vars) + 1))


def random_qdcnf(
    n_universal: int,
    k_existential: int,
    d: int,
    m: int,
    prefix_shape: str = "random",
    seed: int = 0,
    min_width: int = 1,
) -> QbfInstance:
    """Seeded random QBF with ``m`` distinct clauses of ``min_width``..d literals.

    Variables are numbered in prefix order.
    """
    if d < 1 or m < 0 or n_universal < 0 or k_existential < 0:
        raise ValueError("need d >= 1 and non-negative counts")
    if not 1 <= min_width <= d:
        raise ValueError("need 1 <= min_width <= d")
    rng = random.Random(seed)
    n = n_universal + k_existential
    quants = _prefix_order(n_universal, k_existential, prefix_shape, rng)
    total = distinct_clause_count(n, d) - distinct_clause_count(n, min_width - 1)
    if m > total:
        raise ValueError(f"{m} distinct clauses requested but only {total} exist")
    width = min(d, n)
    if 2 * m > total:
        pool = [
            _canon((v if s else -v) for v, s in zip(vs, signs))
            for size in range(min_width, width + 1)
            for vs in itertools.combinations(range(1, n + 1), size)
            for signs in itertools.product((True, False), repeat=size)
        ]
        chosen: Iterable[Clause] = rng.sample(pool, m)
    else:
        seen: dict[Clause, None] = {}
        variables = range(1, n + 1)
        while len(seen) < m:
            size = rng.randint(min_width, width)
            seen[_canon(v if rng.random() < 0.5 else -v for v in rng.sample(variables, size))] = None
        chosen = seen
    return QbfInstance(QuantPrefix(tuple(zip(quants, range(1, n + 1)))), CnfMatrix(tuple(chosen)))


def _canon(lits: Iterable[int]) -> Clause:
    return tuple(sorted(lits, key=lit_key))


def random_clause_graph(rng: random.Random, K: int, d: int, max_part: int, n_vars: int) -> ClauseGraph:
    """Random clause graph with distinct labels of exactly ``d`` literals per part."""
    labels_available = comb(n_vars, d) * 2**d
    parts = []
    for _ in range(K):
        size = rng.randint(0, min(max_part, labels_available))
        seen: dict[Clause, None] = {}
        while len(seen) < size:
            vs = rng.sample(range(1, n_vars + 1), d)
            seen[tuple(sorted((v if rng.random() < 0.5 else -v for v in vs), key=lit_key))] = None
        parts.append(tuple(seen))
    return ClauseGraph(tuple(range(1, n_vars + 1)), tuple(parts), d)


def random_qcsp(
    rng: random.Random,
    max_vars: int = 5,
    max_domain: int = 3,
    max_arity: int = 2,
    max_constraints: int = 4,
) -> QcspInstance:
    n = rng.randint(0, max_vars)
    variables = tuple(
        QcspVariable(f"x{i}", rng.choice((EXISTS, FORALL)), tuple(range(rng.randint(1, max_domain))))
        for i in range(n)
    )
    constraints = []
    for _ in range(rng.randint(0, max_constraints)):
        arity = rng.randint(0, min(max_arity, n)) if n else 0
        scope = tuple(rng.choice(range(n)) for _ in range(arity))
        rows = list(itertools.product(*(variables[i].domain for i in scope)))
        keep = rng.uniform(0.3, 1.0)
        table = frozenset(r for r in rows if rng.random() < keep)
        constraints.append(Constraint(scope, table))
    return QcspInstance(variables, tuple(constraints))
