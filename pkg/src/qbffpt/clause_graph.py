"""K-partite clause graphs built from tautology instances.

Vertex ``j`` of part ``i`` carries the label ``parts[i][j]``, a clause with
exactly ``d`` literals.  Two vertices are adjacent iff they lie in different
parts and their labels clash; edges are never stored.  A selection picks one
vertex per part; it is independent iff no two chosen labels clash, which
happens iff some assignment falsifies one clause of every source formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .expansion import TautInstance
from .formula import Clause, clash, evaluate, lit_key, make_clause

Selection = tuple[int, ...]


@dataclass(frozen=True)
class ClauseGraph:
    universe: tuple[int, ...]
    parts: tuple[tuple[Clause, ...], ...]
    d: int
    pads: tuple[int, ...] = ()
    provenance: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.provenance:
            object.__setattr__(self, "provenance", ("",) * len(self.parts))

    @property
    def K(self) -> int:
        return len(self.parts)

    def part_sizes(self) -> list[int]:
        return [len(p) for p in self.parts]

    def num_vertices(self) -> int:
        return sum(len(p) for p in self.parts)

    def validate(self) -> None:
        universe = set(self.universe)
        for i, part in enumerate(self.parts):
            if len(set(part)) != len(part):
                raise ValueError(f"part {i} repeats a label")
            for c in part:
                if len(c) != self.d or make_clause(c) != c:
                    raise ValueError(f"label {c} in part {i} is not a canonical {self.d}-clause")
                if any(abs(lit) not in universe for lit in c):
                    raise ValueError(f"label {c} in part {i} leaves the universe")

    def adjacent(self, i: int, u: int, j: int, v: int) -> bool:
        return i != j and clash(self.parts[i][u], self.parts[j][v])

    def neighbors(self, i: int, u: int) -> list[tuple[int, int]]:
        label = self.parts[i][u]
        return [
            (j, v)
            for j, part in enumerate(self.parts)
            if j != i
            for v, other in enumerate(part)
            if clash(label, other)
        ]

    def with_parts(self, parts) -> "ClauseGraph":
        return ClauseGraph(self.universe, tuple(tuple(p) for p in parts), self.d, self.pads, self.provenance)


def pad_clause(c: Clause, d: int, pads: Sequence[int]) -> Clause:
    """Fill ``c`` up to ``d`` literals with positive pad variables."""
    if len(c) > d:
        raise ValueError(f"clause {c} is wider than {d}")
    missing = d - len(c)
    if missing > len(pads):
        raise ValueError(f"need {missing} pad variables, got {len(pads)}")
    if not missing:
        return c
    return tuple(sorted(c + tuple(pads[:missing]), key=lit_key))


def build_cgis(t: TautInstance) -> ClauseGraph:
    d = t.d
    top = max(t.universe, default=0)
    for f in t.formulas:
        for c in f.clauses:
            for lit in c:
                if abs(lit) > top:
                    top = abs(lit)
    # an empty clause (only present without pruning) needs d pads, not d - 1
    n_pads = d if any(f.is_false for f in t.formulas) else max(d - 1, 0)
    pads = tuple(range(top + 1, top + 1 + n_pads))
    parts = []
    for f in t.formulas:
        parts.append(tuple(dict.fromkeys(pad_clause(c, d, pads) for c in f.clauses)))
    return ClauseGraph(
        universe=tuple(sorted(set(t.universe) | set(pads))),
        parts=tuple(parts),
        d=d,
        pads=pads,
        provenance=t.provenance,
    )


def _check_selection(g: ClauseGraph, s: Sequence[int]) -> None:
    if len(s) != g.K:
        raise IndexError(f"selection has {len(s)} entries for {g.K} parts")
    for i, j in enumerate(s):
        if not 0 <= j < len(g.parts[i]):
            raise IndexError(f"vertex {j} out of range for part {i}")


def is_independent(g: ClauseGraph, s: Sequence[int]) -> bool:
    _check_selection(g, s)
    chosen: set[int] = set()
    for i, j in enumerate(s):
        label = g.parts[i][j]
        if any(-lit in chosen for lit in label):
            return False
        chosen.update(label)
    return True


def extract_countermodel(g: ClauseGraph, s: Sequence[int]) -> dict[int, bool]:
    """Assignment over the universe falsifying every chosen label.

    Variables not mentioned by a chosen label default to false.
    """
    if not is_independent(g, s):
        raise ValueError("selection is not independent")
    alpha = {v: False for v in g.universe}
    for i, j in enumerate(s):
        for lit in g.parts[i][j]:
            alpha[abs(lit)] = lit < 0
    return alpha


def falsifies_all(t: TautInstance, alpha: Mapping[int, bool]) -> bool:
    return not any(evaluate(f, alpha) for f in t.formulas)
